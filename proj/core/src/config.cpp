#include "aoheom/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "aoheom/errors.hpp"

namespace aoheom {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& v, int line) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ParseError("expected a number, got '" + v + "'", line);
    }
    return out;
}

long long parse_integer(const std::string& v, int line) {
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw ParseError("expected an integer, got '" + v + "'", line);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void check(bool ok, const std::string& what, int line) {
    if (!ok) throw ParseError(what, line);
}

}  // namespace

std::string to_string(TerminatorMode mode) { return mode == TerminatorMode::eq8 ? "eq8" : "zero"; }

std::string to_string(TruncationMode mode) {
    return mode == TruncationMode::global ? "global" : "per_bath";
}

std::string to_string(RadialMode mode) { return mode == RadialMode::unit ? "unit" : "linear"; }

void RunConfig::validate() const {
    if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
    bath().validate();
    for (int k : pade_K) {
        if (k < 0 || k > 20) throw InvalidArgument("pade_K must be in [0, 20]");
    }
    if (depth < 0) throw InvalidArgument("depth must be >= 0");
    propagator().validate();
    if (!(mu0 > 0.0)) throw InvalidArgument("mu0 must be > 0");
    if (apodization_rate && !(*apodization_rate >= 0.0)) {
        throw InvalidArgument("apodization_rate must be >= 0");
    }
    if (padding < 1) throw InvalidArgument("padding must be >= 1");
    if (components.empty()) throw InvalidArgument("at least one component is required");
    if (output_dir.empty()) throw InvalidArgument("output_dir must not be empty");
    if (max_equilibration_steps == 0) throw InvalidArgument("max_equilibration_steps must be >= 1");
    if (n_max_list.empty()) throw InvalidArgument("n_max_list must not be empty");
    for (std::size_t i = 0; i < n_max_list.size(); ++i) {
        if (n_max_list[i] < 1 || (i > 0 && n_max_list[i] <= n_max_list[i - 1])) {
            throw InvalidArgument("n_max_list must be strictly ascending and >= 1");
        }
    }
}

BathSpec RunConfig::bath() const {
    BathSpec b;
    for (int a = 0; a < 3; ++a) b.axes[a] = DrudeBath{eta[a], gamma[a]};
    b.beta = beta;
    return b;
}

PropagatorConfig RunConfig::propagator() const {
    PropagatorConfig p;
    p.dt = dt;
    p.n_steps = n_steps;
    p.terminator = terminator;
    p.equilibration_tolerance = equilibration_tolerance;
    p.max_equilibration_steps = max_equilibration_steps;
    p.workers = workers;
    return p;
}

double RunConfig::effective_apodization_rate() const {
    return apodization_rate ? *apodization_rate : default_apodization_rate(n_steps, dt);
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::array<bool, 3> eta_set{};
    std::array<bool, 3> gamma_set{};
    bool n_max_set = false;
    bool beta_set = false;
    std::map<std::string, int> seen;  // "<section>.<key>" -> first line

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    int section = -1;  // -1 top level, otherwise axis index
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        if (body.front() == '[') {
            check(body.back() == ']', "unterminated section header", line);
            const std::string name = trim(body.substr(1, body.size() - 2));
            check(name.size() == 1 && (name == "x" || name == "y" || name == "z"),
                  "unknown section '" + name + "'", line);
            section = static_cast<int>(parse_axis(name[0]));
            continue;
        }
        const auto eq = body.find('=');
        check(eq != std::string::npos, "expected 'key = value'", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        check(!key.empty(), "missing key", line);
        check(!value.empty(), "missing value for '" + key + "'", line);
        const std::string scoped = (section < 0 ? std::string{} : std::string(1, "xyz"[section])) + "." + key;
        check(seen.emplace(scoped, line).second, "duplicate key '" + key + "'", line);

        auto axes_of = [&](auto&& fn) {
            if (section < 0) {
                for (int a = 0; a < 3; ++a) fn(a);
            } else {
                fn(section);
            }
        };

        if (key == "eta") {
            const double v = parse_double(value, line);
            check(v >= 0.0, "eta must be >= 0", line);
            axes_of([&](int a) { c.eta[a] = v; eta_set[a] = true; });
        } else if (key == "gamma") {
            const double v = parse_double(value, line);
            check(v > 0.0, "gamma must be > 0", line);
            axes_of([&](int a) { c.gamma[a] = v; gamma_set[a] = true; });
        } else if (key == "pade_K") {
            const auto v = parse_integer(value, line);
            check(v >= 0 && v <= 20, "pade_K must be in [0, 20]", line);
            axes_of([&](int a) { c.pade_K[a] = static_cast<int>(v); });
        } else if (section >= 0) {
            throw ParseError("key '" + key + "' is not allowed in an axis section", line);
        } else if (key == "n_max") {
            const auto v = parse_integer(value, line);
            check(v >= 1 && v <= 1000, "n_max must be >= 1", line);
            c.n_max = static_cast<int>(v);
            n_max_set = true;
        } else if (key == "beta") {
            c.beta = parse_double(value, line);
            check(c.beta > 0.0, "beta must be > 0", line);
            beta_set = true;
        } else if (key == "depth") {
            const auto v = parse_integer(value, line);
            check(v >= 0 && v <= 64, "depth must be in [0, 64]", line);
            c.depth = static_cast<int>(v);
        } else if (key == "truncation") {
            check(value == "global" || value == "per_bath", "truncation must be global or per_bath", line);
            c.truncation = value == "global" ? TruncationMode::global : TruncationMode::per_bath;
        } else if (key == "dt") {
            c.dt = parse_double(value, line);
            check(c.dt > 0.0, "dt must be > 0", line);
        } else if (key == "n_steps") {
            const auto v = parse_integer(value, line);
            check(v >= 1, "n_steps must be >= 1", line);
            c.n_steps = static_cast<std::size_t>(v);
        } else if (key == "terminator") {
            check(value == "eq8" || value == "zero", "terminator must be eq8 or zero", line);
            c.terminator = value == "eq8" ? TerminatorMode::eq8 : TerminatorMode::zero;
        } else if (key == "dipole_radial_mode") {
            check(value == "unit" || value == "linear", "dipole_radial_mode must be unit or linear", line);
            c.dipole_radial_mode = value == "unit" ? RadialMode::unit : RadialMode::linear;
        } else if (key == "mu0") {
            c.mu0 = parse_double(value, line);
            check(c.mu0 > 0.0, "mu0 must be > 0", line);
        } else if (key == "apodization_rate") {
            const double v = parse_double(value, line);
            check(v >= 0.0, "apodization_rate must be >= 0", line);
            c.apodization_rate = v;
        } else if (key == "padding") {
            const auto v = parse_integer(value, line);
            check(v >= 1 && v <= 64, "padding must be in [1, 64]", line);
            c.padding = static_cast<int>(v);
        } else if (key == "components") {
            c.components.clear();
            for (const auto& item : split_list(value)) {
                try {
                    c.components.push_back(Component::parse(item));
                } catch (const InvalidArgument& e) {
                    throw ParseError(e.what(), line);
                }
            }
            check(!c.components.empty(), "components must not be empty", line);
        } else if (key == "output_dir") {
            c.output_dir = value;
        } else if (key == "workers") {
            const auto v = parse_integer(value, line);
            check(v >= 1 && v <= 4096, "workers must be >= 1", line);
            c.workers = static_cast<unsigned>(v);
        } else if (key == "equilibration_tolerance") {
            c.equilibration_tolerance = parse_double(value, line);
            check(c.equilibration_tolerance > 0.0, "equilibration_tolerance must be > 0", line);
        } else if (key == "max_equilibration_steps") {
            const auto v = parse_integer(value, line);
            check(v >= 1, "max_equilibration_steps must be >= 1", line);
            c.max_equilibration_steps = static_cast<std::size_t>(v);
        } else if (key == "n_max_list") {
            c.n_max_list.clear();
            for (const auto& item : split_list(value)) {
                const auto v = parse_integer(item, line);
                check(v >= 1, "n_max_list entries must be >= 1", line);
                check(c.n_max_list.empty() || v > c.n_max_list.back(),
                      "n_max_list must be strictly ascending", line);
                c.n_max_list.push_back(static_cast<int>(v));
            }
        } else {
            throw ParseError("unknown key '" + key + "'", line);
        }
    }

    const int end = line + 1;
    check(n_max_set, "missing required key 'n_max'", end);
    check(beta_set, "missing required key 'beta'", end);
    for (int a = 0; a < 3; ++a) {
        check(eta_set[a], std::string("missing required key 'eta' for axis ") + "xyz"[a], end);
        check(gamma_set[a], std::string("missing required key 'gamma' for axis ") + "xyz"[a], end);
    }
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), end);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "n_max = " << c.n_max << '\n';
    os << "beta = " << format_double(c.beta) << '\n';
    os << "depth = " << c.depth << '\n';
    os << "truncation = " << to_string(c.truncation) << '\n';
    os << "dt = " << format_double(c.dt) << '\n';
    os << "n_steps = " << c.n_steps << '\n';
    os << "terminator = " << to_string(c.terminator) << '\n';
    os << "dipole_radial_mode = " << to_string(c.dipole_radial_mode) << '\n';
    os << "mu0 = " << format_double(c.mu0) << '\n';
    if (c.apodization_rate) os << "apodization_rate = " << format_double(*c.apodization_rate) << '\n';
    os << "padding = " << c.padding << '\n';
    os << "components = ";
    for (std::size_t i = 0; i < c.components.size(); ++i) os << (i ? ", " : "") << c.components[i].name();
    os << '\n';
    os << "output_dir = " << c.output_dir << '\n';
    os << "workers = " << c.workers << '\n';
    os << "equilibration_tolerance = " << format_double(c.equilibration_tolerance) << '\n';
    os << "max_equilibration_steps = " << c.max_equilibration_steps << '\n';
    os << "n_max_list = ";
    for (std::size_t i = 0; i < c.n_max_list.size(); ++i) os << (i ? ", " : "") << c.n_max_list[i];
    os << '\n';
    for (int a = 0; a < 3; ++a) {
        os << "\n[" << "xyz"[a] << "]\n";
        os << "eta = " << format_double(c.eta[a]) << '\n';
        os << "gamma = " << format_double(c.gamma[a]) << '\n';
        os << "pade_K = " << c.pade_K[a] << '\n';
    }
    return os.str();
}

}  // namespace aoheom
