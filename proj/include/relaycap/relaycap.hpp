// SPDX-License-Identifier: Apache-2.0
//
// relaycap: capacity bounds for Gaussian MIMO relay channels
// Copyright (C) 2026 The relaycap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "relaycap/kernels.hpp"
#include "relaycap/rng.hpp"
#include "relaycap/channel.hpp"
#include "relaycap/channel_io.hpp"
#include "relaycap/bounds.hpp"
#include "relaycap/optimizer.hpp"
#include "relaycap/compute.hpp"
#include "relaycap/gaps.hpp"
