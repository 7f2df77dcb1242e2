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

// Channel JSON documents:
//   {"t1": 2, "t2": 2, "r2": 2, "r3": 2,
//    "G21": [[re, im], ...], "G31": [...], "G32": [...]}
// Matrices are row-major flat arrays of [re, im] pairs. A nested
// array-of-rows layout is accepted on load as well.

#include "relaycap/channel.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace relaycap
{

/// Malformed channel document; the message names the offending field.
class ChannelFormatError : public std::runtime_error
{
  public:
    ChannelFormatError(std::string field, const std::string &what)
        : std::runtime_error("field \"" + field + "\": " + what), field_(std::move(field))
    {
    }
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

namespace detail
{

inline cplx parse_pair(const nlohmann::json &v, const std::string &field, std::size_t index)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ChannelFormatError(field, "entry " + std::to_string(index) + " is not a [re, im] pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline CMat parse_matrix(const nlohmann::json &doc, const std::string &field, int rows, int cols)
{
    if (!doc.contains(field))
        throw ChannelFormatError(field, "missing");
    const auto &arr = doc.at(field);
    if (!arr.is_array())
        throw ChannelFormatError(field, "must be an array");
    CMat m(rows, cols);
    const auto expected = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const bool nested = !arr.empty() && arr[0].is_array() && !arr[0].empty() && arr[0][0].is_array();
    if (nested)
    {
        if (arr.size() != static_cast<std::size_t>(rows))
            throw ChannelFormatError(field, "has " + std::to_string(arr.size()) + " rows, expected " + std::to_string(rows));
        for (int i = 0; i < rows; ++i)
        {
            if (!arr[i].is_array() || arr[i].size() != static_cast<std::size_t>(cols))
                throw ChannelFormatError(field, "row " + std::to_string(i) + " does not have " + std::to_string(cols) +
                                                    " entries");
            for (int j = 0; j < cols; ++j)
                m(i, j) = parse_pair(arr[i][j], field, static_cast<std::size_t>(i * cols + j));
        }
        return m;
    }
    if (arr.size() != expected)
        throw ChannelFormatError(field, "has " + std::to_string(arr.size()) + " entries, expected " +
                                            std::to_string(expected) + " (" + std::to_string(rows) + "x" +
                                            std::to_string(cols) + ")");
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = parse_pair(arr[static_cast<std::size_t>(i * cols + j)], field, static_cast<std::size_t>(i * cols + j));
    return m;
}

inline int parse_dim(const nlohmann::json &doc, const std::string &field)
{
    if (!doc.contains(field))
        throw ChannelFormatError(field, "missing");
    const auto &v = doc.at(field);
    if (!v.is_number_integer())
        throw ChannelFormatError(field, "must be an integer");
    const auto n = v.get<long long>();
    if (n < 1 || n > max_antennas)
        throw ChannelFormatError(field, "must be in [1, " + std::to_string(max_antennas) + "]");
    return static_cast<int>(n);
}

inline nlohmann::json matrix_to_json(const CMat &m)
{
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            arr.push_back({m(i, j).real(), m(i, j).imag()});
    return arr;
}

} // namespace detail

inline ChannelMatrices channel_from_json(const nlohmann::json &doc)
{
    if (!doc.is_object())
        throw ChannelFormatError("<root>", "document must be a JSON object");
    AntennaConfig c;
    c.t1 = detail::parse_dim(doc, "t1");
    c.t2 = detail::parse_dim(doc, "t2");
    c.r2 = detail::parse_dim(doc, "r2");
    c.r3 = detail::parse_dim(doc, "r3");
    CMat g21 = detail::parse_matrix(doc, "G21", c.r2, c.t1);
    CMat g31 = detail::parse_matrix(doc, "G31", c.r3, c.t1);
    CMat g32 = detail::parse_matrix(doc, "G32", c.r3, c.t2);
    return ChannelMatrices(c, std::move(g21), std::move(g31), std::move(g32));
}

inline nlohmann::json channel_to_json(const ChannelMatrices &ch)
{
    const auto &c = ch.config();
    return nlohmann::json{{"t1", c.t1},
                          {"t2", c.t2},
                          {"r2", c.r2},
                          {"r3", c.r3},
                          {"G21", detail::matrix_to_json(ch.g21())},
                          {"G31", detail::matrix_to_json(ch.g31())},
                          {"G32", detail::matrix_to_json(ch.g32())}};
}

inline ChannelMatrices parse_channel(const std::string &text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ChannelFormatError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return channel_from_json(doc);
}

inline ChannelMatrices load_channel(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open channel file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_channel(ss.str());
}

} // namespace relaycap
