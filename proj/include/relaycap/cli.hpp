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

// Command-line front end. Every command writes CSV with a `#` header block
// describing the run; wall-clock time and the output path, which would
// break byte-stable output, go to a sidecar <out>.manifest.json instead.
//
// Exit codes: 0 success, 2 some solve was flagged, 1 bad input.

#include "relaycap/channel_io.hpp"
#include "relaycap/compute.hpp"
#include "relaycap/gaps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaycap::cli
{

inline constexpr const char *tool_version = "1.0.0";

enum ExitCode : int
{
    exit_ok = 0,
    exit_input_error = 1,
    exit_flagged = 2
};

/// Bad command-line input; reported with exit code 1.
class InputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// %.9g, with "inf" for +infinity.
inline std::string format_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string format_noise(const std::optional<CompressionNoise> &n)
{
    if (!n)
        return "";
    return format_number(n->sigma2());
}

inline double parse_double(const std::string &s, const std::string &what)
{
    try
    {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size())
            return v;
    }
    catch (const std::exception &)
    {
    }
    throw InputError(what + ": \"" + s + "\" is not a number");
}

inline std::vector<std::string> split_list(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(item);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

/// "a:step:b" (inclusive), or a comma-separated list of values.
inline std::vector<double> parse_grid(const std::string &s, const std::string &what)
{
    if (s.find(':') != std::string::npos)
    {
        const auto parts = split_list(s, ':');
        if (parts.size() != 3)
            throw InputError(what + ": expected a:step:b, got \"" + s + "\"");
        const double a = parse_double(parts[0], what), step = parse_double(parts[1], what),
                     b = parse_double(parts[2], what);
        if (!(step > 0.0) || !(b >= a))
            throw InputError(what + ": need step > 0 and b >= a in \"" + s + "\"");
        std::vector<double> out;
        for (long k = 0;; ++k)
        {
            const double v = a + static_cast<double>(k) * step;
            if (v > b + 1e-9 * step)
                break;
            out.push_back(v);
            if (out.size() > 1000000)
                throw InputError(what + ": grid too large");
        }
        return out;
    }
    std::vector<double> out;
    for (const auto &p : split_list(s, ','))
        out.push_back(parse_double(p, what));
    if (out.empty())
        throw InputError(what + ": empty list");
    return out;
}

inline std::vector<int> parse_ints(const std::string &s, std::size_t n, const std::string &what)
{
    const auto parts = split_list(s, ',');
    if (parts.size() != n)
        throw InputError(what + ": expected " + std::to_string(n) + " comma-separated integers, got \"" + s + "\"");
    std::vector<int> out;
    for (const auto &p : parts)
    {
        const double v = parse_double(p, what);
        if (v != std::floor(v) || std::abs(v) > 1e6)
            throw InputError(what + ": \"" + p + "\" is not an integer");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

inline AntennaConfig parse_dims(const std::string &s)
{
    const auto v = parse_ints(s, 4, "--dims");
    AntennaConfig c{v[0], v[1], v[2], v[3]};
    c.validate();
    return c;
}

inline std::pair<int, int> parse_split(const std::string &s)
{
    const auto v = parse_ints(s, 2, "--split");
    return {v[0], v[1]};
}

/// Comma-separated variances; "0" is a noiseless auxiliary, "inf" an uninformative one.
inline std::vector<CompressionNoise> parse_noise_grid(const std::string &s)
{
    std::vector<CompressionNoise> out;
    for (const auto &p : split_list(s, ','))
    {
        if (p == "inf" || p == "INF" || p == "infinity")
            out.push_back(CompressionNoise::infinite());
        else
        {
            const double v = parse_double(p, "--sigma2-grid");
            if (v == 0.0)
                out.push_back(CompressionNoise::zero());
            else if (v > 0.0 && std::isfinite(v))
                out.push_back(CompressionNoise::finite(v));
            else
                throw InputError("--sigma2-grid: \"" + p + "\" must be 0, positive, or inf");
        }
    }
    if (out.empty())
        throw InputError("--sigma2-grid: empty list");
    return out;
}

inline std::vector<BoundKind> parse_bounds(const std::string &s)
{
    std::vector<BoundKind> out;
    for (const auto &p : split_list(s, ','))
    {
        try
        {
            out.push_back(parse_bound_kind(p));
        }
        catch (const std::invalid_argument &e)
        {
            throw InputError(std::string("--bounds: ") + e.what());
        }
    }
    if (out.empty())
        throw InputError("--bounds: empty list");
    return out;
}

/// Reproducibility record of one run.
struct RunManifest
{
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters; // everything that shapes the output
    std::uint64_t seed = 0;
    std::map<std::string, int> counts; // solver flags and similar tallies
    double wall_clock_seconds = 0.0;

    std::string header() const
    {
        std::ostringstream os;
        os << "# relaycap " << tool_version << "\n# command: " << command << "\n";
        for (const auto &[k, v] : parameters)
            os << "# " << k << ": " << v << "\n";
        os << "# seed: " << seed << "\n";
        os << "# snr convention: P = 10^(snr_db/10) with unit noise variance at every receiver\n";
        for (const auto &[k, v] : counts)
            os << "# " << k << ": " << v << "\n";
        return os.str();
    }

    nlohmann::json to_json(const std::vector<std::string> &outputs) const
    {
        nlohmann::json p = nlohmann::json::object();
        for (const auto &[k, v] : parameters)
            p[k] = v;
        return {{"tool", "relaycap"},
                {"version", tool_version},
                {"command", command},
                {"parameters", p},
                {"seed", seed},
                {"counts", counts},
                {"wall_clock_seconds", wall_clock_seconds},
                {"outputs", outputs}};
    }
};

/// Text written to `<path>.partial` and renamed into place on commit.
/// An empty path means standard output.
class OutputFile
{
  public:
    explicit OutputFile(std::string path, std::ostream &fallback) : path_(std::move(path)), fallback_(fallback) {}

    std::ostream &stream() { return buffer_; }
    const std::string &path() const { return path_; }

    void commit()
    {
        if (path_.empty())
        {
            fallback_ << buffer_.str();
            fallback_.flush();
            return;
        }
        const std::string partial = path_ + ".partial";
        {
            std::ofstream out(partial, std::ios::binary | std::ios::trunc);
            if (!out)
                throw InputError("cannot write " + partial);
            out << buffer_.str();
            out.flush();
            if (!out)
                throw InputError("write failed for " + partial);
        }
        std::error_code ec;
        std::filesystem::rename(partial, path_, ec);
        if (ec)
            throw InputError("cannot rename " + partial + " to " + path_ + ": " + ec.message());
    }

  private:
    std::string path_;
    std::ostream &fallback_;
    std::ostringstream buffer_;
};

/// Options shared by the commands.
struct CommonOptions
{
    std::string channel_path;
    std::string dims;
    std::uint64_t seed = 0;
    int channels = 1;
    int gap_channels = 200;
    std::optional<double> power;
    std::string snr_db;
    std::string bounds;
    std::string sigma2_grid;
    std::optional<double> tol;
    std::string out;
    int threads = 1;
    std::string mode;
    std::string split;
    std::string g;
    std::string aggregates;
    std::uint64_t stream = 0;
};

namespace detail
{

inline SolverConfig solver_config(const CommonOptions &o, RunManifest &m)
{
    SolverConfig cfg;
    cfg.seed = o.seed;
    if (o.tol)
    {
        if (!(*o.tol > 0.0))
            throw InputError("--tol must be positive");
        cfg.tol_bits = *o.tol;
    }
    if (!o.sigma2_grid.empty())
        cfg.sigma2_grid = parse_noise_grid(o.sigma2_grid);
    m.parameters.emplace_back("tol_bits", format_number(cfg.tol_bits));
    std::string grid;
    for (const auto &n : cfg.sigma2_grid)
        grid += (grid.empty() ? "" : ",") + format_number(n.sigma2());
    m.parameters.emplace_back("sigma2_grid", grid);
    return cfg;
}

// (snr_db, P) pairs from --power or --snr-db
inline std::vector<std::pair<double, double>> power_grid(const CommonOptions &o, RunManifest &m)
{
    if (o.power && !o.snr_db.empty())
        throw InputError("give either --power or --snr-db, not both");
    std::vector<std::pair<double, double>> out;
    if (o.power)
    {
        if (!(*o.power > 0.0) || !std::isfinite(*o.power))
            throw InputError("--power must be positive and finite");
        out.emplace_back(10.0 * std::log10(*o.power), *o.power);
        m.parameters.emplace_back("power", format_number(*o.power));
        return out;
    }
    if (o.snr_db.empty())
        throw InputError("one of --power or --snr-db is required");
    for (double db : parse_grid(o.snr_db, "--snr-db"))
        out.emplace_back(db, PowerConstraint::from_db(db).P);
    m.parameters.emplace_back("snr_db", o.snr_db);
    return out;
}

inline void require_threads(const CommonOptions &o)
{
    if (o.threads < 1)
        throw InputError("--threads must be >= 1");
}

inline void write_manifest(const RunManifest &m, const std::vector<std::string> &outputs)
{
    if (outputs.empty() || outputs.front().empty())
        return;
    OutputFile f(outputs.front() + ".manifest.json", std::cout);
    f.stream() << m.to_json(outputs).dump(2) << "\n";
    f.commit();
}

inline const char *bounds_columns = "channel_id,snr_db,bound,value_bits,sigma2_used,certificate_gap_bits";

inline std::string bound_row(int id, double snr_db, const BoundResult &r)
{
    return std::to_string(id) + "," + format_number(snr_db) + "," + to_string(r.kind) + "," +
           format_number(r.value_bits) + "," + format_noise(r.sigma2_used) + "," + format_number(r.certificate_gap_bits);
}

} // namespace detail

inline int cmd_bounds(const CommonOptions &o, std::ostream &out)
{
    const auto t0 = std::chrono::steady_clock::now();
    detail::require_threads(o);
    RunManifest m;
    m.command = "bounds";
    m.seed = o.seed;
    std::vector<ChannelMatrices> channels;
    if (!o.channel_path.empty())
    {
        if (!o.dims.empty())
            throw InputError("give either --channel or --dims, not both");
        channels.push_back(load_channel(o.channel_path));
        m.parameters.emplace_back("channel", std::filesystem::path(o.channel_path).filename().string());
    }
    else
    {
        if (o.dims.empty())
            throw InputError("one of --channel or --dims is required");
        if (o.channels < 1)
            throw InputError("--channels must be >= 1");
        const AntennaConfig c = parse_dims(o.dims);
        for (int i = 0; i < o.channels; ++i)
            channels.push_back(random_channel(c, o.seed, static_cast<std::uint64_t>(i)));
        m.parameters.emplace_back("dims", o.dims);
        m.parameters.emplace_back("channels", std::to_string(o.channels));
    }
    const auto grid = detail::power_grid(o, m);
    const auto kinds = parse_bounds(o.bounds.empty() ? "CS,DF,DT,PDF,NPDF,CF" : o.bounds);
    for (BoundKind k : kinds)
        if (is_half_duplex(k))
            throw InputError(std::string("--bounds: ") + to_string(k) + " needs the halfduplex command");
    m.parameters.emplace_back("bounds", o.bounds.empty() ? "CS,DF,DT,PDF,NPDF,CF" : o.bounds);
    const SolverConfig cfg = detail::solver_config(o, m);

    const int n_grid = static_cast<int>(grid.size());
    std::vector<std::vector<BoundResult>> results(channels.size() * grid.size());
    relaycap::detail::parallel_for(static_cast<int>(results.size()), o.threads, [&](int i) {
        const auto &[db, P] = grid[static_cast<std::size_t>(i % n_grid)];
        BoundSuite suite(channels[static_cast<std::size_t>(i / n_grid)], P, cfg);
        for (BoundKind k : kinds)
            results[static_cast<std::size_t>(i)].push_back(suite.bound(k));
    });
    int flagged = 0;
    for (const auto &rs : results)
        for (const auto &r : rs)
            flagged += r.flagged ? 1 : 0;
    m.counts["solver_flags"] = flagged;

    OutputFile f(o.out, out);
    f.stream() << m.header() << detail::bounds_columns << "\n";
    for (std::size_t i = 0; i < results.size(); ++i)
        for (const auto &r : results[i])
            f.stream() << detail::bound_row(static_cast<int>(i / grid.size()), grid[i % grid.size()].first, r) << "\n";
    f.commit();
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(m, {o.out});
    return flagged > 0 ? exit_flagged : exit_ok;
}

inline std::string aggregates_path(const std::string &out)
{
    std::filesystem::path p(out);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + ".aggregates.csv")).string();
}

inline int cmd_gaps(const CommonOptions &o, std::ostream &out)
{
    const auto t0 = std::chrono::steady_clock::now();
    detail::require_threads(o);
    if (o.out.empty())
        throw InputError("gaps: --out is required (two CSV files are written)");
    if (o.gap_channels < 0)
        throw InputError("--channels must be >= 0");
    RunManifest m;
    m.command = "gaps";
    m.seed = o.seed;
    const std::string dims = o.dims.empty() ? "2,2,2,2" : o.dims;
    const AntennaConfig c = parse_dims(dims);
    const std::string snr = o.snr_db.empty() ? "-10:10:30" : o.snr_db;
    if (o.power)
        throw InputError("gaps takes --snr-db, not --power");
    const auto grid = parse_grid(snr, "--snr-db");
    m.parameters.emplace_back("dims", dims);
    m.parameters.emplace_back("channels", std::to_string(o.gap_channels));
    m.parameters.emplace_back("snr_db", snr);
    const SolverConfig cfg = detail::solver_config(o, m);

    const GapReport rep = montecarlo_gaps(c, o.gap_channels, grid, o.seed, cfg, o.threads);
    int flagged_rows = 0;
    for (const auto &r : rep.rows)
        flagged_rows += r.flagged ? 1 : 0;
    m.counts["points"] = rep.points;
    m.counts["flagged_points_excluded"] = rep.flagged_points;
    m.counts["low_rate_points_excluded_from_ratios"] = rep.low_rate_points;
    m.counts["solver_flags"] = flagged_rows;

    OutputFile rows(o.out, out);
    rows.stream() << m.header() << "channel_id,snr_db,bound,value_bits,sigma2_used,certificate_gap_bits,flagged\n";
    for (const auto &r : rep.rows)
        rows.stream() << r.channel_id << "," << format_number(r.snr_db) << "," << to_string(r.bound) << ","
                      << format_number(r.value_bits) << "," << format_noise(r.sigma2_used) << ","
                      << format_number(r.certificate_gap_bits) << "," << (r.flagged ? 1 : 0) << "\n";
    const std::string agg_path = o.aggregates.empty() ? aggregates_path(o.out) : o.aggregates;
    OutputFile agg(agg_path, out);
    agg.stream() << m.header() << "snr_db,metric,max,avg,count\n";
    for (const auto &a : rep.aggregates)
        agg.stream() << format_number(a.snr_db) << "," << a.metric << "," << format_number(a.max) << ","
                     << format_number(a.avg) << "," << a.count << "\n";
    rows.commit();
    agg.commit();
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(m, {o.out, agg_path});
    return flagged_rows > 0 ? exit_flagged : exit_ok;
}

inline int cmd_separation(const CommonOptions &o, std::ostream &out)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (o.g.empty())
        throw InputError("separation: --g is required");
    const double P = o.power.value_or(10.0);
    if (!(P > 0.0) || !std::isfinite(P))
        throw InputError("--power must be positive and finite");
    const auto gs = parse_grid(o.g, "--g");
    for (double g : gs)
        if (!(g > 0.0))
            throw InputError("--g values must be positive");
    RunManifest m;
    m.command = "separation";
    m.parameters.emplace_back("g", o.g);
    m.parameters.emplace_back("power", format_number(P));
    OutputFile f(o.out, out);
    f.stream() << m.header() << "g,pdf_lower_bits,dfdt_upper_bits,separation_bits\n";
    for (const auto &r : separation_curve(gs, P))
        f.stream() << format_number(r.g) << "," << format_number(r.pdf_lower_bits) << ","
                   << format_number(r.dfdt_upper_bits) << "," << format_number(r.separation_bits) << "\n";
    f.commit();
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(m, {o.out});
    return exit_ok;
}

inline HalfDuplexMode parse_mode(const std::string &s)
{
    if (s == "sfd")
        return HalfDuplexMode::SFD;
    if (s == "rfd")
        return HalfDuplexMode::RFD;
    throw InputError("--mode must be sfd or rfd, got \"" + s + "\"");
}

inline int cmd_halfduplex(const CommonOptions &o, std::ostream &out)
{
    const auto t0 = std::chrono::steady_clock::now();
    detail::require_threads(o);
    if (o.mode.empty() || o.split.empty())
        throw InputError("halfduplex: --mode and --split are required");
    const HalfDuplexMode mode = parse_mode(o.mode);
    const auto split = parse_split(o.split);
    RunManifest m;
    m.command = "halfduplex";
    m.seed = o.seed;
    m.parameters.emplace_back("mode", o.mode);
    m.parameters.emplace_back("split", o.split);
    std::vector<HalfDuplexChannel> channels;
    if (!o.channel_path.empty())
    {
        if (!o.dims.empty())
            throw InputError("give either --channel or --dims, not both");
        channels.push_back(extract_halfduplex(load_channel(o.channel_path), mode, split));
        m.parameters.emplace_back("channel", std::filesystem::path(o.channel_path).filename().string());
    }
    else
    {
        if (o.dims.empty())
            throw InputError("one of --channel or --dims is required");
        if (o.channels < 1)
            throw InputError("--channels must be >= 1");
        const AntennaConfig c = parse_dims(o.dims);
        for (int i = 0; i < o.channels; ++i)
            channels.push_back(random_halfduplex(mode, c, split, o.seed, static_cast<std::uint64_t>(i)));
        m.parameters.emplace_back("dims", o.dims);
        m.parameters.emplace_back("channels", std::to_string(o.channels));
    }
    const auto grid = detail::power_grid(o, m);
    const std::string defaults = mode == HalfDuplexMode::SFD ? "SFD_CAP,SFD_CF" : "RFD_CS,RFD_PDF,RFD_CF";
    const std::string bound_list = o.bounds.empty() ? defaults : o.bounds;
    const auto kinds = parse_bounds(bound_list);
    for (BoundKind k : kinds)
    {
        const bool sfd_kind = k == BoundKind::SFD_CAP || k == BoundKind::SFD_CF;
        const bool rfd_kind = k == BoundKind::RFD_CS || k == BoundKind::RFD_PDF || k == BoundKind::RFD_CF;
        if ((mode == HalfDuplexMode::SFD && !sfd_kind) || (mode == HalfDuplexMode::RFD && !rfd_kind))
            throw InputError(std::string("--bounds: ") + to_string(k) + " does not apply to " + o.mode + " channels");
    }
    m.parameters.emplace_back("bounds", bound_list);
    const SolverConfig cfg = detail::solver_config(o, m);
    const double slack = 2.0 * cfg.tol_bits + 1e-3;

    struct Point
    {
        std::vector<BoundResult> results;
        double left = 0.0, right = 0.0; // (CS, PDF) for SFD, (PDF, NPDF) for RFD
        bool flagged = false;
    };
    const int n_grid = static_cast<int>(grid.size());
    std::vector<Point> points(channels.size() * grid.size());
    relaycap::detail::parallel_for(static_cast<int>(points.size()), o.threads, [&](int i) {
        HalfDuplexSuite suite(channels[static_cast<std::size_t>(i / n_grid)], grid[static_cast<std::size_t>(i % n_grid)].second, cfg);
        Point &p = points[static_cast<std::size_t>(i)];
        for (BoundKind k : kinds)
            p.results.push_back(suite.bound(k));
        if (mode == HalfDuplexMode::SFD)
        {
            const SfdCheck c = suite.sfd_check();
            p.left = c.cs_bits;
            p.right = c.pdf_bits;
            p.flagged = c.flagged;
        }
        else
        {
            const RfdCheck c = suite.rfd_check();
            p.left = c.pdf_bits;
            p.right = c.npdf_bits;
            p.flagged = c.flagged;
        }
    });
    int flagged = 0;
    for (const auto &p : points)
    {
        flagged += p.flagged ? 1 : 0;
        for (const auto &r : p.results)
            flagged += r.flagged ? 1 : 0;
    }
    m.counts["solver_flags"] = flagged;
    m.parameters.emplace_back("equality slack bits", format_number(slack));

    OutputFile f(o.out, out);
    f.stream() << m.header() << detail::bounds_columns
               << (mode == HalfDuplexMode::SFD ? ",cs_bits,pdf_bits,cs_equals_pdf\n"
                                               : ",pdf_bits,npdf_bits,pdf_equals_npdf\n");
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const Point &p = points[i];
        const bool equal = std::abs(p.left - p.right) <= slack;
        for (const auto &r : p.results)
            f.stream() << detail::bound_row(static_cast<int>(i / grid.size()), grid[i % grid.size()].first, r) << ","
                       << format_number(p.left) << "," << format_number(p.right) << "," << (equal ? "true" : "false")
                       << "\n";
    }
    f.commit();
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(m, {o.out});
    return flagged > 0 ? exit_flagged : exit_ok;
}

/// Random channel as JSON. With --mode/--split the half-duplex channel is
/// written in its full-duplex embedded form.
inline int cmd_gen_channel(const CommonOptions &o, std::ostream &out)
{
    if (o.dims.empty())
        throw InputError("gen-channel: --dims is required");
    const AntennaConfig c = parse_dims(o.dims);
    ChannelMatrices ch;
    if (!o.mode.empty())
    {
        if (o.split.empty())
            throw InputError("gen-channel: --mode needs --split");
        ch = embed(random_halfduplex(parse_mode(o.mode), c, parse_split(o.split), o.seed, o.stream));
    }
    else
        ch = random_channel(c, o.seed, o.stream);
    OutputFile f(o.out, out);
    f.stream() << channel_to_json(ch).dump(2) << "\n";
    f.commit();
    return exit_ok;
}

/// Parses argv and runs one command.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    CLI::App app{"relaycap: capacity bounds for Gaussian MIMO relay channels"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);
    CommonOptions o;

    const auto add_solver = [&o](CLI::App *c) {
        c->add_option("--sigma2-grid", o.sigma2_grid, "compression noise grid, e.g. 0,0.25,1,4,inf");
        c->add_option("--tol", o.tol, "solver tolerance in bits (default 1e-3)");
        c->add_option("--threads", o.threads, "worker threads (output does not depend on it)");
    };
    const auto add_channel = [&o](CLI::App *c) {
        c->add_option("--channel", o.channel_path, "channel JSON file");
        c->add_option("--dims", o.dims, "t1,t2,r2,r3 for random channels");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--channels", o.channels, "number of random channels");
    };

    auto *bounds = app.add_subcommand("bounds", "compute bounds for one or more channels");
    add_channel(bounds);
    bounds->add_option("--power", o.power, "power P (linear)");
    bounds->add_option("--snr-db", o.snr_db, "SNR grid in dB, a:step:b or a list");
    bounds->add_option("--bounds", o.bounds, "comma list of CS,DF,DT,PDF,NPDF,CF");
    bounds->add_option("--out", o.out, "output CSV (default stdout)");
    add_solver(bounds);

    auto *gaps = app.add_subcommand("gaps", "Monte Carlo gap experiment");
    gaps->add_option("--dims", o.dims, "t1,t2,r2,r3 (default 2,2,2,2)");
    gaps->add_option("--seed", o.seed, "random seed");
    gaps->add_option("--channels", o.gap_channels, "number of channels (default 200)");
    gaps->add_option("--snr-db", o.snr_db, "SNR grid in dB (default -10:10:30)");
    gaps->add_option("--power", o.power, "not accepted; use --snr-db");
    gaps->add_option("--out", o.out, "per-bound CSV")->required();
    gaps->add_option("--aggregates", o.aggregates, "aggregate CSV (default <out stem>.aggregates.csv)");
    add_solver(gaps);

    auto *sep = app.add_subcommand("separation", "partial decode-forward vs decode-forward/direct transmission");
    sep->add_option("--g", o.g, "gain grid, a:step:b or a list")->required();
    sep->add_option("--power", o.power, "power P (default 10)");
    sep->add_option("--out", o.out, "output CSV (default stdout)");

    auto *hd = app.add_subcommand("halfduplex", "half-duplex bounds");
    add_channel(hd);
    hd->add_option("--mode", o.mode, "sfd or rfd")->required();
    hd->add_option("--split", o.split, "t1',t1'' (sfd) or r3',r3'' (rfd)")->required();
    hd->add_option("--power", o.power, "power P (linear)");
    hd->add_option("--snr-db", o.snr_db, "SNR grid in dB");
    hd->add_option("--bounds", o.bounds, "SFD_CAP,SFD_CF or RFD_CS,RFD_PDF,RFD_CF");
    hd->add_option("--out", o.out, "output CSV (default stdout)");
    add_solver(hd);

    auto *gen = app.add_subcommand("gen-channel", "write a random channel as JSON");
    gen->add_option("--dims", o.dims, "t1,t2,r2,r3")->required();
    gen->add_option("--seed", o.seed, "random seed");
    gen->add_option("--stream", o.stream, "channel index within the seed");
    gen->add_option("--mode", o.mode, "sfd or rfd: embedded half-duplex channel");
    gen->add_option("--split", o.split, "half-duplex split");
    gen->add_option("--out", o.out, "output JSON (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try
    {
        if (bounds->parsed())
            return cmd_bounds(o, out);
        if (gaps->parsed())
            return cmd_gaps(o, out);
        if (sep->parsed())
            return cmd_separation(o, out);
        if (hd->parsed())
            return cmd_halfduplex(o, out);
        return cmd_gen_channel(o, out);
    }
    catch (const ChannelFormatError &e)
    {
        err << "relaycap: malformed channel: " << e.what() << "\n";
    }
    catch (const std::exception &e)
    {
        err << "relaycap: " << e.what() << "\n";
    }
    return exit_input_error;
}

} // namespace relaycap::cli
