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


#include "relaycap/channel_io.hpp"
#include "relaycap/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace relaycap;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    int code = 0;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "relaycap");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

fs::path scratch(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("relaycap_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path &p, const std::string &text)
{
    std::ofstream f(p);
    f << text;
}

std::string read_file(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Data rows of a CSV as column -> value maps, skipping the # block.
std::vector<std::map<std::string, std::string>> csv_rows(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        const auto cells = cli::split_list(line, ',');
        if (header.empty())
        {
            header = cells;
            continue;
        }
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i)
            row[header[i]] = cells[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

CMat s(double v)
{
    return CMat::Constant(1, 1, cplx(v, 0.0));
}

} // namespace

TEST_CASE("bounds: direct transmission on a scalar channel", "[cli]")
{
    const fs::path dir = scratch("dt");
    write_file(dir / "ch.json", channel_to_json(ChannelMatrices::from_matrices(s(0.5), s(1.0), s(0.7))).dump());
    const Outcome o = run_cli({"bounds", "--channel", (dir / "ch.json").string(), "--power", "3", "--bounds", "DT"});
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("bound") == "DT");
    CHECK(std::stod(rows[0].at("value_bits")) == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("bounds: malformed channel names the field", "[cli]")
{
    const fs::path dir = scratch("bad");
    nlohmann::json doc = channel_to_json(random_channel({1, 1, 1, 1}, 1));
    doc.erase("G32");
    write_file(dir / "ch.json", doc.dump());
    const Outcome o = run_cli({"bounds", "--channel", (dir / "ch.json").string(), "--power", "1"});
    CHECK(o.code == 1);
    CHECK(o.err.find("G32") != std::string::npos);
}

TEST_CASE("bounds: six bounds obey the sandwich", "[cli]")
{
    const fs::path dir = scratch("six");
    const Outcome o = run_cli({"bounds", "--dims", "2,2,2,2", "--seed", "7", "--power", "10", "--out",
                               (dir / "b.csv").string()});
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(read_file(dir / "b.csv"));
    REQUIRE(rows.size() == 6);
    std::map<std::string, double> v;
    for (const auto &r : rows)
        v[r.at("bound")] = std::stod(r.at("value_bits"));
    const double slack = 3e-3;
    CHECK(v["DT"] <= v["PDF"] + slack);
    CHECK(v["DF"] <= v["PDF"] + slack);
    CHECK(v["NPDF"] <= v["PDF"] + slack);
    CHECK(v["PDF"] <= v["CS"] + slack);
    CHECK(v["DT"] <= v["CF"] + slack);
    CHECK(v["CF"] <= v["CS"] + slack);
    CHECK(fs::exists(dir / "b.csv.manifest.json"));
    CHECK_FALSE(fs::exists(dir / "b.csv.partial"));
}

TEST_CASE("gaps: repeated runs are byte-identical", "[cli]")
{
    const fs::path dir = scratch("gaps");
    const auto go = [&](const std::string &name, const std::string &threads) {
        return run_cli({"gaps", "--channels", "2", "--snr-db", "0,10", "--seed", "5", "--threads", threads, "--out",
                        (dir / name).string()});
    };
    REQUIRE(go("a.csv", "1").code == 0);
    REQUIRE(go("b.csv", "2").code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "a.aggregates.csv") == read_file(dir / "b.aggregates.csv"));
    CHECK(csv_rows(read_file(dir / "a.csv")).size() == 2 * 2 * 6);
    CHECK_FALSE(csv_rows(read_file(dir / "a.aggregates.csv")).empty());
    CHECK(run_cli({"gaps", "--channels", "1"}).code == 1);
}

TEST_CASE("separation rows", "[cli]")
{
    const Outcome o = run_cli({"separation", "--g", "1,10", "--power", "10"});
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1].at("separation_bits")) == Catch::Approx(2.540).margin(1e-3));
    const Outcome one = run_cli({"separation", "--g", "1", "--power", "1"});
    CHECK(std::stod(csv_rows(one.out)[0].at("separation_bits")) == Catch::Approx(-2.0).margin(1e-9));
}

TEST_CASE("halfduplex: sfd unit gains", "[cli]")
{
    const fs::path dir = scratch("sfd");
    const HalfDuplexChannel hd(HalfDuplexMode::SFD, {1, 1}, s(1.0), s(1.0), s(1.0));
    write_file(dir / "ch.json", channel_to_json(sfd_embed(hd)).dump());
    const Outcome o = run_cli({"halfduplex", "--mode", "sfd", "--split", "1,1", "--channel",
                               (dir / "ch.json").string(), "--power", "10"});
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.out);
    REQUIRE_FALSE(rows.empty());
    for (const auto &r : rows)
        CHECK(r.at("cs_equals_pdf") == "true");
}

TEST_CASE("halfduplex: rfd with a severed relay link", "[cli]")
{
    const fs::path dir = scratch("rfd");
    const HalfDuplexChannel hd(HalfDuplexMode::RFD, {1, 1}, s(0.9), s(1.3), s(0.0));
    write_file(dir / "ch.json", channel_to_json(rfd_embed(hd)).dump());
    const Outcome o = run_cli({"halfduplex", "--mode", "rfd", "--split", "1,1", "--channel",
                               (dir / "ch.json").string(), "--power", "4", "--bounds", "RFD_CS,RFD_PDF"});
    REQUIRE(o.code == 0);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[0].at("value_bits")) == Catch::Approx(std::log2(1.0 + 1.69 * 4.0)).margin(2e-3));
    CHECK(rows[1].at("pdf_equals_npdf") == "true");
}

TEST_CASE("input errors exit with 1", "[cli]")
{
    CHECK(run_cli({"halfduplex", "--mode", "sfd", "--split", "2,1", "--dims", "2,1,1,1", "--power", "1"}).code == 1);
    CHECK(run_cli({"halfduplex", "--mode", "xyz", "--split", "1,1", "--dims", "2,1,1,1", "--power", "1"}).code == 1);
    CHECK(run_cli({"bounds", "--dims", "2,2,2", "--power", "1"}).code == 1);
    CHECK(run_cli({"bounds", "--dims", "1,1,1,1", "--power", "-1"}).code == 1);
    CHECK(run_cli({"bounds", "--dims", "1,1,1,1", "--power", "1", "--bounds", "SFD_CAP"}).code == 1);
    CHECK(run_cli({"bounds", "--dims", "1,1,1,1", "--power", "1", "--tol", "0"}).code == 1);
    CHECK(run_cli({"nonsense"}).code == 1);
}

TEST_CASE("gen-channel writes a loadable channel", "[cli]")
{
    const fs::path dir = scratch("gen");
    REQUIRE(run_cli({"gen-channel", "--dims", "2,1,2,3", "--seed", "4", "--out", (dir / "c.json").string()}).code == 0);
    const ChannelMatrices ch = load_channel((dir / "c.json").string());
    CHECK(detail::max_abs(ch.g31() - random_channel({2, 1, 2, 3}, 4).g31()) == 0.0);
}
