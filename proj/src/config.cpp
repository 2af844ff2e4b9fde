#include "plate/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace plate {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// Shortest round-trip form, for messages.
std::string show(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

enum class Kind { Real, Integer, Boolean, Expr, Text, MethodName };

struct KeyInfo {
    const char* section;
    Kind kind;
    unsigned vars = 0;  // allowed expression variables
};

const std::map<std::string, KeyInfo, std::less<>>& key_table() {
    using E = Expression;
    static const std::map<std::string, KeyInfo, std::less<>> table = {
        {"D", {"plate", Kind::Real}},          {"nu", {"plate", Kind::Real}},
        {"k0", {"plate", Kind::Real}},         {"k1", {"plate", Kind::Real}},
        {"a1", {"plate", Kind::Real}},         {"a2", {"plate", Kind::Real}},
        {"Lx", {"grid", Kind::Real}},          {"Ly", {"grid", Kind::Real}},
        {"Nx", {"grid", Kind::Integer}},       {"Ny", {"grid", Kind::Integer}},
        {"t0", {"time", Kind::Real}},          {"tf", {"time", Kind::Real}},
        {"ns", {"time", Kind::Integer}},
        {"winit", {"initial", Kind::Expr, E::X | E::Y}},
        {"vinit", {"initial", Kind::Expr, E::X | E::Y}},
        {"g_N", {"loads", Kind::Expr, E::X | E::Y}},
        {"g_S", {"loads", Kind::Expr, E::X | E::Y}},
        {"g_E", {"loads", Kind::Expr, E::X | E::Y}},
        {"h_N", {"loads", Kind::Expr, E::X | E::Y}},
        {"h_S", {"loads", Kind::Expr, E::X | E::Y}},
        {"h_E", {"loads", Kind::Expr, E::X | E::Y}},
        {"f", {"forcing", Kind::Expr, E::X | E::Y | E::T}},
        {"method", {"solver", Kind::MethodName}},
        {"rel_tol", {"solver", Kind::Real}},   {"abs_tol", {"solver", Kind::Real}},
        {"max_step", {"solver", Kind::Real}},
        {"energies", {"output", Kind::Boolean}}, {"snapshots", {"output", Kind::Boolean}},
        {"output_dir", {"output", Kind::Text}},
    };
    return table;
}

const char* const kRequired[] = {"D", "Lx", "Ly", "Nx", "Ny", "nu", "t0", "tf", "ns"};
const char* const kSections[] = {"plate", "grid", "time", "initial", "loads", "forcing", "solver", "output"};

double* real_field(RunConfig& c, std::string_view k) {
    if (k == "D") return &c.D;
    if (k == "nu") return &c.nu;
    if (k == "k0") return &c.k0;
    if (k == "k1") return &c.k1;
    if (k == "a1") return &c.a1;
    if (k == "a2") return &c.a2;
    if (k == "Lx") return &c.Lx;
    if (k == "Ly") return &c.Ly;
    if (k == "t0") return &c.t0;
    if (k == "tf") return &c.tf;
    if (k == "rel_tol") return &c.rel_tol;
    if (k == "abs_tol") return &c.abs_tol;
    if (k == "max_step") return &c.max_step;
    return nullptr;
}

Expression* expr_field(RunConfig& c, std::string_view k) {
    if (k == "winit") return &c.winit;
    if (k == "vinit") return &c.vinit;
    if (k == "g_N") return &c.g_N;
    if (k == "g_S") return &c.g_S;
    if (k == "g_E") return &c.g_E;
    if (k == "h_N") return &c.h_N;
    if (k == "h_S") return &c.h_S;
    if (k == "h_E") return &c.h_E;
    if (k == "f") return &c.f;
    return nullptr;
}

std::string unquote(std::string_view v) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
        return std::string(v.substr(1, v.size() - 2));
    return std::string(v);
}

double parse_real(std::string_view key, std::string_view v, int line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'", line);
    return out;
}

int parse_integer(std::string_view key, std::string_view v, int line) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'", line);
    return out;
}

bool parse_bool(std::string_view key, std::string_view v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'", line);
}

Method parse_method(std::string_view v, int line) {
    if (v == "trapezoidal") return Method::ImplicitTrapezoidal;
    if (v == "rk4") return Method::ExplicitRK4;
    throw ConfigError("method: expected 'trapezoidal' or 'rk4', got '" + std::string(v) + "'", line);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header", line);
            const std::string name(trim(s.substr(1, s.size() - 2)));
            if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections))
                throw ConfigError("unknown section [" + name + "]", line);
            section = name;
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key(trim(s.substr(0, eq)));
        const std::string value = unquote(trim(s.substr(eq + 1)));
        if (key.empty()) throw ConfigError("missing key before '='", line);

        const auto it = key_table().find(key);
        if (it == key_table().end()) throw ConfigError("unknown key '" + key + "'", line);
        const KeyInfo& info = it->second;
        if (!section.empty() && section != info.section)
            throw ConfigError("key '" + key + "' belongs to section [" + info.section + "], not [" +
                                  section + "]",
                              line);
        if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line);
        if (value.empty() && info.kind != Kind::Text)
            throw ConfigError("missing value for '" + key + "'", line);

        switch (info.kind) {
            case Kind::Real: *real_field(cfg, key) = parse_real(key, value, line); break;
            case Kind::Integer:
                (key == "Nx" ? cfg.Nx : key == "Ny" ? cfg.Ny : cfg.ns) = parse_integer(key, value, line);
                break;
            case Kind::Boolean:
                (key == "energies" ? cfg.energies : cfg.snapshots) = parse_bool(key, value, line);
                break;
            case Kind::Expr:
                try {
                    *expr_field(cfg, key) = Expression::parse(value, info.vars);
                } catch (const ExpressionError& e) {
                    throw ConfigError(key + ": " + e.what(), line);
                }
                break;
            case Kind::MethodName: cfg.method = parse_method(value, line); break;
            case Kind::Text: cfg.output_dir = value; break;
        }
    }
    for (const char* k : kRequired)
        if (!seen.count(k)) throw ConfigError(std::string("missing required key '") + k + "'");
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("'" + path.string() + "': " + e.what());
        }
        if (!j.contains("config_text") || !j["config_text"].is_string())
            throw ConfigError("'" + path.string() + "' has no config_text field");
        return parse_config(j["config_text"].get<std::string>());
    }
    return parse_config(ss.str());
}

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(D > 0.0)) fail("D must be positive, got " + show(D));
    if (!(Lx > 0.0)) fail("Lx must be positive, got " + show(Lx));
    if (!(Ly > 0.0)) fail("Ly must be positive, got " + show(Ly));
    if (Nx < 5) fail("Nx must be at least 5, got " + std::to_string(Nx));
    if (Ny < 5) fail("Ny must be at least 5, got " + std::to_string(Ny));
    if (!(nu > 0.0 && nu < 0.5))
        fail("nu (Poisson ratio) must lie in (0, 1/2), got " + show(nu));
    if (!(k0 >= 0.0)) fail("k0 must be non-negative, got " + show(k0));
    if (!(k1 >= 0.0)) fail("k1 must be non-negative, got " + show(k1));
    if (!(tf > t0)) fail("tf must be greater than t0");
    if (ns < 2) fail("ns must be at least 2, got " + std::to_string(ns));
    if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
    if (!(abs_tol > 0.0)) fail("abs_tol must be positive");
    if (!(max_step >= 0.0)) fail("max_step must be non-negative");
}

GridSpec RunConfig::grid() const { return GridSpec(Lx, Ly, Nx, Ny); }

PlateParams RunConfig::params() const {
    PlateParams p;
    p.D = D;
    p.nu = nu;
    p.k0 = k0;
    p.k1 = k1;
    p.a1 = a1;
    p.a2 = a2;
    return p;
}

TimeGrid RunConfig::time_grid() const { return TimeGrid{t0, tf, ns}; }

IntegratorConfig RunConfig::solver() const {
    IntegratorConfig c;
    c.method = method;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.max_step = max_step;
    return c;
}

namespace {

EdgeLoad edge_load(const Expression& e) {
    if (e.is_constant()) return EdgeLoad(e());
    return EdgeLoad(EdgeLoad::Fn([e](double x, double y) { return e(x, y); }));
}

NodalFunction nodal(const Expression& e) {
    if (e.is_zero()) return {};
    return [e](double x, double y) { return e(x, y); };
}

}  // namespace

BoundaryLoads RunConfig::loads() const {
    BoundaryLoads b;
    b.g_north = edge_load(g_N);
    b.g_south = edge_load(g_S);
    b.g_east = edge_load(g_E);
    b.h_north = edge_load(h_N);
    b.h_south = edge_load(h_S);
    b.h_east = edge_load(h_E);
    return b;
}

ForcingSpec RunConfig::forcing() const {
    ForcingSpec s;
    if (!f.is_zero()) {
        const Expression e = f;
        s.f = [e](double x, double y, double t) { return e(x, y, t); };
    }
    return s;
}

NodalFunction RunConfig::initial_displacement() const { return nodal(winit); }
NodalFunction RunConfig::initial_velocity() const { return nodal(vinit); }

std::string RunConfig::to_text() const {
    std::ostringstream o;
    auto num = [&](const char* k, double v) { o << k << " = " << format_double(v) << '\n'; };
    auto expr = [&](const char* k, const Expression& e) { o << k << " = " << e.text() << '\n'; };
    o << "[plate]\n";
    num("D", D);
    num("nu", nu);
    num("k0", k0);
    num("k1", k1);
    num("a1", a1);
    num("a2", a2);
    o << "\n[grid]\n";
    num("Lx", Lx);
    num("Ly", Ly);
    o << "Nx = " << Nx << "\nNy = " << Ny << '\n';
    o << "\n[time]\n";
    num("t0", t0);
    num("tf", tf);
    o << "ns = " << ns << '\n';
    o << "\n[initial]\n";
    expr("winit", winit);
    expr("vinit", vinit);
    o << "\n[loads]\n";
    expr("g_N", g_N);
    expr("g_S", g_S);
    expr("g_E", g_E);
    expr("h_N", h_N);
    expr("h_S", h_S);
    expr("h_E", h_E);
    o << "\n[forcing]\n";
    expr("f", f);
    o << "\n[solver]\n";
    o << "method = " << to_string(method) << '\n';
    num("rel_tol", rel_tol);
    num("abs_tol", abs_tol);
    num("max_step", max_step);
    o << "\n[output]\n";
    o << "energies = " << (energies ? "true" : "false") << '\n';
    o << "snapshots = " << (snapshots ? "true" : "false") << '\n';
    o << "output_dir = " << output_dir << '\n';
    return o.str();
}

const std::vector<std::string>& RunConfig::sweepable() {
    static const std::vector<std::string> keys = {"D", "nu", "k0", "k1", "a1", "a2"};
    return keys;
}

double RunConfig::get_number(std::string_view key) const {
    if (std::find(sweepable().begin(), sweepable().end(), key) == sweepable().end())
        throw ConfigError("'" + std::string(key) + "' is not a sweepable parameter");
    return *real_field(const_cast<RunConfig&>(*this), key);
}

void RunConfig::set_number(std::string_view key, double value) {
    if (std::find(sweepable().begin(), sweepable().end(), key) == sweepable().end())
        throw ConfigError("'" + std::string(key) + "' is not a sweepable parameter");
    *real_field(*this, key) = value;
}

}  // namespace plate
