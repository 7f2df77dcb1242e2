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

// Channel model: Y2 = G21 X1 + Z2, Y3 = G31 X1 + G32 X2 + Z3 with unit-variance
// noise at both receivers, plus the two half-duplex variants.

#include "relaycap/kernels.hpp"
#include "relaycap/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace relaycap
{

inline constexpr int max_antennas = 16;

struct AntennaConfig
{
    int t1 = 1; // sender transmit antennas
    int t2 = 1; // relay transmit antennas
    int r2 = 1; // relay receive antennas
    int r3 = 1; // receiver antennas

    void validate() const
    {
        const auto check = [](int v, const char *name) {
            if (v < 1 || v > max_antennas)
                throw std::invalid_argument(std::string("AntennaConfig: ") + name + " = " + std::to_string(v) +
                                            " outside [1, " + std::to_string(max_antennas) + "]");
        };
        check(t1, "t1");
        check(t2, "t2");
        check(r2, "r2");
        check(r3, "r3");
    }

    bool operator==(const AntennaConfig &) const = default;
};

struct PowerConstraint
{
    double P = 0.0;

    explicit PowerConstraint(double p = 0.0) : P(p)
    {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("PowerConstraint: P must be finite and nonnegative");
    }

    static PowerConstraint from_db(double snr_db) { return PowerConstraint(std::pow(10.0, snr_db / 10.0)); }
};

class ChannelMatrices
{
  public:
    ChannelMatrices() = default;

    ChannelMatrices(const AntennaConfig &config, CMat g21, CMat g31, CMat g32)
        : config_(config), g21_(std::move(g21)), g31_(std::move(g31)), g32_(std::move(g32))
    {
        config_.validate();
        expect_shape(g21_, config_.r2, config_.t1, "G21");
        expect_shape(g31_, config_.r3, config_.t1, "G31");
        expect_shape(g32_, config_.r3, config_.t2, "G32");
    }

    /// Infer the configuration from the matrix shapes.
    static ChannelMatrices from_matrices(const CMat &g21, const CMat &g31, const CMat &g32)
    {
        AntennaConfig c{static_cast<int>(g21.cols()), static_cast<int>(g32.cols()), static_cast<int>(g21.rows()),
                        static_cast<int>(g31.rows())};
        return ChannelMatrices(c, g21, g31, g32);
    }

    const AntennaConfig &config() const { return config_; }
    const CMat &g21() const { return g21_; }
    const CMat &g31() const { return g31_; }
    const CMat &g32() const { return g32_; }

    /// [G31 G32], r3 x (t1 + t2)
    CMat g3star() const { return detail::hstack(g31_, g32_); }

    /// [G21; G31], (r2 + r3) x t1
    CMat gstar1() const { return detail::vstack(g21_, g31_); }

  private:
    static void expect_shape(const CMat &m, int rows, int cols, const char *name)
    {
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument(std::string("ChannelMatrices: ") + name + " is " + std::to_string(m.rows()) + "x" +
                                        std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
    }

    AntennaConfig config_;
    CMat g21_, g31_, g32_;
};

enum class HalfDuplexMode
{
    SFD,
    RFD
};

inline const char *to_string(HalfDuplexMode m)
{
    return m == HalfDuplexMode::SFD ? "sfd" : "rfd";
}

/// Half-duplex relay channel with its mode-specific blocks.
///
/// SFD, split (t1', t1''): the sender input is X1 = (X1', X1''); X1'' reaches
/// the relay only, X1' reaches the receiver only. Stored blocks are
/// G21 (r2 x t1''), G31 (r3 x t1'), G32 (r3 x t2).
///
/// RFD, split (r3', r3''): the receiver output is Y3 = (Y3', Y3''); X1 reaches
/// Y3' and X2 reaches Y3'' on orthogonal bands. Stored blocks are
/// G21 (r2 x t1), G31 (r3' x t1), G32 (r3'' x t2).
struct HalfDuplexChannel
{
    HalfDuplexMode mode = HalfDuplexMode::SFD;
    std::pair<int, int> split{1, 1};
    CMat G21, G31, G32;

    HalfDuplexChannel() = default;

    HalfDuplexChannel(HalfDuplexMode m, std::pair<int, int> s, CMat g21, CMat g31, CMat g32)
        : mode(m), split(s), G21(std::move(g21)), G31(std::move(g31)), G32(std::move(g32))
    {
        validate();
    }

    void validate() const
    {
        if (split.first < 1 || split.second < 1)
            throw std::invalid_argument("HalfDuplexChannel: split parts must be >= 1");
        if (mode == HalfDuplexMode::SFD)
        {
            if (G31.cols() != split.first || G21.cols() != split.second)
                throw std::invalid_argument("HalfDuplexChannel: SFD blocks do not match split (t1', t1'')");
            if (G31.rows() != G32.rows())
                throw std::invalid_argument("HalfDuplexChannel: G31' and G32 must share r3 rows");
        }
        else
        {
            if (G31.rows() != split.first || G32.rows() != split.second)
                throw std::invalid_argument("HalfDuplexChannel: RFD blocks do not match split (r3', r3'')");
            if (G21.cols() != G31.cols())
                throw std::invalid_argument("HalfDuplexChannel: G21 and G31' must share t1 columns");
        }
        embedded_config().validate();
    }

    int t1() const { return mode == HalfDuplexMode::SFD ? split.first + split.second : static_cast<int>(G21.cols()); }
    int t2() const { return static_cast<int>(G32.cols()); }
    int r2() const { return static_cast<int>(G21.rows()); }
    int r3() const { return mode == HalfDuplexMode::SFD ? static_cast<int>(G31.rows()) : split.first + split.second; }

    AntennaConfig embedded_config() const { return {t1(), t2(), r2(), r3()}; }
};

/// Every entry of G21, G31, G32 is drawn CN(0, 1) from CounterRng(seed, stream),
/// in the order G21, G31, G32, each row-major.
inline ChannelMatrices random_channel(const AntennaConfig &config, std::uint64_t seed, std::uint64_t stream = 0)
{
    config.validate();
    CounterRng rng(seed, stream);
    const auto draw = [&rng](int rows, int cols) {
        CMat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = rng.complex_normal();
        return m;
    };
    CMat g21 = draw(config.r2, config.t1);
    CMat g31 = draw(config.r3, config.t1);
    CMat g32 = draw(config.r3, config.t2);
    return ChannelMatrices(config, std::move(g21), std::move(g31), std::move(g32));
}

/// Random half-duplex channel; `config` gives the embedded (full-duplex) dimensions.
inline HalfDuplexChannel random_halfduplex(HalfDuplexMode mode, const AntennaConfig &config, std::pair<int, int> split,
                                           std::uint64_t seed, std::uint64_t stream = 0)
{
    config.validate();
    const int total = mode == HalfDuplexMode::SFD ? config.t1 : config.r3;
    if (split.first < 1 || split.second < 1 || split.first + split.second != total)
        throw std::invalid_argument(std::string("random_halfduplex: split does not add up to ") +
                                    (mode == HalfDuplexMode::SFD ? "t1" : "r3"));
    CounterRng rng(seed, stream);
    const auto draw = [&rng](int rows, int cols) {
        CMat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = rng.complex_normal();
        return m;
    };
    if (mode == HalfDuplexMode::SFD)
    {
        CMat g21 = draw(config.r2, split.second);
        CMat g31 = draw(config.r3, split.first);
        CMat g32 = draw(config.r3, config.t2);
        return HalfDuplexChannel(mode, split, std::move(g21), std::move(g31), std::move(g32));
    }
    CMat g21 = draw(config.r2, config.t1);
    CMat g31 = draw(split.first, config.t1);
    CMat g32 = draw(split.second, config.t2);
    return HalfDuplexChannel(mode, split, std::move(g21), std::move(g31), std::move(g32));
}

/// Full-duplex channel with G31 = [G31' 0] and G21 = [0 G21''].
inline ChannelMatrices sfd_embed(const HalfDuplexChannel &hd)
{
    if (hd.mode != HalfDuplexMode::SFD)
        throw std::invalid_argument("sfd_embed: channel is not in SFD mode");
    hd.validate();
    const int t1a = hd.split.first, t1b = hd.split.second;
    CMat g21 = CMat::Zero(hd.r2(), t1a + t1b);
    g21.rightCols(t1b) = hd.G21;
    CMat g31 = CMat::Zero(hd.r3(), t1a + t1b);
    g31.leftCols(t1a) = hd.G31;
    return ChannelMatrices(hd.embedded_config(), std::move(g21), std::move(g31), hd.G32);
}

/// Full-duplex channel with G31 = [G31'; 0] and G32 = [0; G32''].
inline ChannelMatrices rfd_embed(const HalfDuplexChannel &hd)
{
    if (hd.mode != HalfDuplexMode::RFD)
        throw std::invalid_argument("rfd_embed: channel is not in RFD mode");
    hd.validate();
    const int r3a = hd.split.first, r3b = hd.split.second;
    CMat g31 = CMat::Zero(r3a + r3b, hd.t1());
    g31.topRows(r3a) = hd.G31;
    CMat g32 = CMat::Zero(r3a + r3b, hd.t2());
    g32.bottomRows(r3b) = hd.G32;
    return ChannelMatrices(hd.embedded_config(), hd.G21, std::move(g31), std::move(g32));
}

inline ChannelMatrices embed(const HalfDuplexChannel &hd)
{
    return hd.mode == HalfDuplexMode::SFD ? sfd_embed(hd) : rfd_embed(hd);
}

/// Inverse of the embeddings: recover the half-duplex blocks from a
/// full-duplex channel, requiring the structural zero blocks to be zero.
inline HalfDuplexChannel extract_halfduplex(const ChannelMatrices &ch, HalfDuplexMode mode, std::pair<int, int> split)
{
    const auto &c = ch.config();
    if (split.first < 1 || split.second < 1)
        throw std::invalid_argument("extract_halfduplex: split parts must be >= 1");
    if (mode == HalfDuplexMode::SFD)
    {
        if (split.first + split.second != c.t1)
            throw std::invalid_argument("extract_halfduplex: t1' + t1'' = " + std::to_string(split.first + split.second) +
                                        " but t1 = " + std::to_string(c.t1));
        if (ch.g21().leftCols(split.first).cwiseAbs().maxCoeff() != 0.0 ||
            ch.g31().rightCols(split.second).cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("extract_halfduplex: SFD structure needs G21 = [0 G21''] and G31 = [G31' 0]");
        return HalfDuplexChannel(mode, split, ch.g21().rightCols(split.second), ch.g31().leftCols(split.first), ch.g32());
    }
    if (split.first + split.second != c.r3)
        throw std::invalid_argument("extract_halfduplex: r3' + r3'' = " + std::to_string(split.first + split.second) +
                                    " but r3 = " + std::to_string(c.r3));
    if (ch.g31().bottomRows(split.second).cwiseAbs().maxCoeff() != 0.0 ||
        ch.g32().topRows(split.first).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("extract_halfduplex: RFD structure needs G31 = [G31'; 0] and G32 = [0; G32'']");
    return HalfDuplexChannel(mode, split, ch.g21(), ch.g31().topRows(split.first), ch.g32().bottomRows(split.second));
}

} // namespace relaycap
