#include "mcvd/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mcvd/errors.hpp"

namespace mcvd {
namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void bad(int line_no, const std::string& msg) {
    fail(Err::ConfigParse, "line " + std::to_string(line_no) + ": " + msg);
}

double parse_num(const std::string& tok, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        bad(line_no, "not a number: '" + tok + "'");
    return v;
}

std::int64_t parse_int(const std::string& tok, int line_no) {
    const double v = parse_num(tok, line_no);
    const double r = std::nearbyint(v);
    if (!std::isfinite(v) || std::fabs(v - r) > 0.0 || std::fabs(r) > 9e15)
        bad(line_no, "not an integer: '" + tok + "'");
    return static_cast<std::int64_t>(r);
}

std::uint64_t parse_seed(const std::string& tok, int line_no) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || tok.front() == '-')
        bad(line_no, "not a seed: '" + tok + "'");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    cfg.hash = fnv1a_hex(text);

    std::set<std::string> seen;
    std::set<std::string> required = {"transmitter", "receiver", "D", "Q",
                                      "sample_interval", "num_samples"};
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash_pos = raw.find('#');
        if (hash_pos != std::string::npos) raw.erase(hash_pos);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::vector<std::string> vals = split_ws(trim(line.substr(eq + 1)));
        if (key.empty()) bad(line_no, "empty key");
        if (vals.empty()) bad(line_no, "no value for key '" + key + "'");

        if (key != "receiver" && !seen.insert(key).second)
            bad(line_no, "duplicate key '" + key + "'");
        required.erase(key);

        auto want = [&](std::size_t n) {
            if (vals.size() != n)
                bad(line_no, "key '" + key + "' takes " + std::to_string(n) + " value(s), got " +
                                 std::to_string(vals.size()));
        };

        if (key == "transmitter") {
            want(3);
            cfg.scenario.transmitter = {parse_num(vals[0], line_no), parse_num(vals[1], line_no),
                                        parse_num(vals[2], line_no)};
        } else if (key == "receiver") {
            want(5);
            Receiver rx;
            rx.id = static_cast<int>(parse_int(vals[0], line_no));
            rx.center = {parse_num(vals[1], line_no), parse_num(vals[2], line_no),
                         parse_num(vals[3], line_no)};
            rx.radius = parse_num(vals[4], line_no);
            cfg.scenario.receivers.push_back(rx);
        } else if (key == "D") {
            want(1);
            cfg.scenario.medium.diffusion_coefficient = parse_num(vals[0], line_no);
        } else if (key == "flow") {
            want(3);
            cfg.scenario.medium.flow = {parse_num(vals[0], line_no), parse_num(vals[1], line_no),
                                        parse_num(vals[2], line_no)};
        } else if (key == "Q") {
            want(1);
            cfg.scenario.molecule_budget = parse_int(vals[0], line_no);
        } else if (key == "sample_interval") {
            want(1);
            cfg.plan.sample_interval = parse_num(vals[0], line_no);
        } else if (key == "num_samples") {
            want(1);
            cfg.plan.num_samples = static_cast<int>(parse_int(vals[0], line_no));
        } else if (key == "sim_step") {
            want(1);
            cfg.sim_step = parse_num(vals[0], line_no);
        } else if (key == "seed") {
            want(1);
            cfg.seed = parse_seed(vals[0], line_no);
        } else if (key == "trials") {
            want(1);
            cfg.trials = static_cast<int>(parse_int(vals[0], line_no));
        } else if (key == "subset_size") {
            want(1);
            cfg.subset_size = static_cast<int>(parse_int(vals[0], line_no));
        } else if (key == "absorption") {
            want(1);
            if (vals[0] == "end_of_step") cfg.policy = AbsorptionPolicy::EndOfStep;
            else if (vals[0] == "chord_bridge") cfg.policy = AbsorptionPolicy::ChordBridge;
            else bad(line_no, "absorption must be end_of_step or chord_bridge");
        } else if (key == "sweep_axis") {
            want(1);
            const std::string& v = vals[0];
            if (v == "radius") cfg.sweep_axis = SweepAxis::Radius;
            else if (v == "budget") cfg.sweep_axis = SweepAxis::Budget;
            else if (v == "diffusion") cfg.sweep_axis = SweepAxis::Diffusion;
            else if (v == "flow_y") cfg.sweep_axis = SweepAxis::FlowY;
            else if (v == "tn_y") cfg.sweep_axis = SweepAxis::TnY;
            else if (v == "sample_interval") cfg.sweep_axis = SweepAxis::SampleInterval;
            else if (v == "subset_size") cfg.sweep_axis = SweepAxis::SubsetSize;
            else if (v == "topology") cfg.sweep_axis = SweepAxis::Topology;
            else bad(line_no, "unknown sweep axis '" + v + "'");
        } else if (key == "sweep_values") {
            for (const std::string& tok : vals) cfg.sweep_values.push_back(parse_num(tok, line_no));
        } else if (key == "tn_positions") {
            if (vals.size() % 3 != 0) bad(line_no, "tn_positions takes x y z triples");
            for (std::size_t i = 0; i < vals.size(); i += 3)
                cfg.tn_positions.push_back({parse_num(vals[i], line_no),
                                            parse_num(vals[i + 1], line_no),
                                            parse_num(vals[i + 2], line_no)});
        } else if (key == "map_x") {
            want(3);
            cfg.map.present = true;
            cfg.map.x0 = parse_num(vals[0], line_no);
            cfg.map.x1 = parse_num(vals[1], line_no);
            cfg.map.nx = static_cast<int>(parse_int(vals[2], line_no));
        } else if (key == "map_y") {
            want(3);
            cfg.map.present = true;
            cfg.map.y0 = parse_num(vals[0], line_no);
            cfg.map.y1 = parse_num(vals[1], line_no);
            cfg.map.ny = static_cast<int>(parse_int(vals[2], line_no));
        } else if (key == "map_z") {
            want(1);
            cfg.map.z = parse_num(vals[0], line_no);
        } else if (key == "map_trials") {
            want(1);
            cfg.map.trials = static_cast<int>(parse_int(vals[0], line_no));
        } else {
            bad(line_no, "unknown key '" + key + "'");
        }
    }

    if (!required.empty()) {
        std::string missing;
        for (const std::string& k : required) missing += (missing.empty() ? "" : ", ") + k;
        fail(Err::ConfigParse, "missing required key(s): " + missing);
    }
    if (cfg.sweep_axis != SweepAxis::None && cfg.sweep_values.empty())
        fail(Err::ConfigParse, "sweep_axis set but sweep_values missing");
    if (cfg.sweep_axis == SweepAxis::None && !cfg.sweep_values.empty())
        fail(Err::ConfigParse, "sweep_values set but sweep_axis missing");
    if (cfg.trials < 1) fail(Err::ConfigParse, "trials must be >= 1");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::Io, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(Err::Io, "cannot read config file: " + path);
    return parse_config(buf.str());
}

}  // namespace mcvd
