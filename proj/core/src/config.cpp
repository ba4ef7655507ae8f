#include "rdseed/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rdseed/adjoint.hpp"
#include "rdseed/errors.hpp"
#include "rdseed/field_io.hpp"
#include "rdseed/initial_data.hpp"

namespace rdseed {

Grid DomainSection::grid() const {
    if (is_2d()) return Grid::rect(xmin, xmax, nx, *ymin, *ymax, *ny);
    return Grid::line(xmin, xmax, nx);
}

TimeConfig TimeSection::make() const {
    if (mesh == "graded") return TimeConfig::graded(T, dt_min, dt_max, ratio);
    return TimeConfig::uniform(T, nt);
}

ReactionModel ReactionSection::make() const {
    if (kind == "bistable") return ReactionModel::bistable(theta);
    if (kind == "monostable") return ReactionModel::monostable(theta);
    if (kind == "convex_power") return ReactionModel::convex_power(exponent);
    return ReactionModel::cubic(c3, c2, c1, c0);
}

OptimizeOptions OptimizerSection::options() const {
    OptimizeOptions o;
    o.max_iter = max_iter;
    o.tol = tol;
    o.patience = patience;
    o.eps_flat_rel = eps_flat;
    o.rule = root_rule == "convex" ? RootRule::convex : RootRule::concave;
    o.cleanup = cleanup;
    return o;
}

AnnealConfig OptimizerSection::anneal(std::uint64_t run_seed) const {
    AnnealConfig a;
    a.initial_temp = initial_temp;
    a.cooling = cooling;
    a.moves_per_temp = moves_per_temp;
    a.move_mass = move_mass;
    a.seed = run_seed;
    a.cell_nodes = cell_nodes;
    a.max_evaluations = max_evaluations;
    return a;
}

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> keys;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    if (line > 0) throw ConfigError("line " + std::to_string(line) + ": " + msg);
    throw ConfigError(msg);
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"domain", {"xmin", "xmax", "nx", "ymin", "ymax", "ny"}},
        {"time", {"T", "nt", "mesh", "dt_min", "dt_max", "ratio"}},
        {"reaction", {"kind", "theta", "exponent", "c3", "c2", "c1", "c0"}},
        {"constraint", {"mass"}},
        {"initial", {"shape", "cx", "cy", "path"}},
        {"optimizer", {"method", "max_iter", "tol", "patience", "eps_flat", "root_rule", "cleanup",
                       "seed", "seed_count", "initial_temp", "cooling", "moves_per_temp",
                       "move_mass", "cell_nodes", "max_evaluations"}},
        {"output", {"dir", "snapshot_stride", "timing"}},
        {"twoscale", {"a", "b", "k"}},
        {"check", {"trials", "seed", "profiles", "t_samples", "r_samples", "mirror", "epsilons"}},
    };
    return s;
}

std::map<std::string, Section> tokenize(const std::string& text) {
    std::map<std::string, Section> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    Section* current = nullptr;
    std::string current_name;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
            current_name = trim(s.substr(1, s.size() - 2));
            if (!schema().count(current_name)) fail(line, "unknown section [" + current_name + "]");
            if (out.count(current_name)) fail(line, "duplicate section [" + current_name + "]");
            current = &out[current_name];
            current->line = line;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
        if (current == nullptr) fail(line, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto& known = schema().at(current_name);
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            fail(line, "unknown key '" + key + "' in [" + current_name + "]");
        }
        if (current->keys.count(key)) fail(line, "duplicate key '" + key + "' in [" + current_name + "]");
        if (value.empty()) fail(line, "empty value for '" + key + "'");
        current->keys[key] = {value, line};
    }
    return out;
}

double to_real(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
        fail(e.line, "'" + key + "' expects a real number, got '" + e.value + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const Entry& e, const std::string& key) {
    std::uint64_t v = 0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    const auto r = std::from_chars(b, end, v);
    if (r.ec != std::errc() || r.ptr != end) {
        fail(e.line, "'" + key + "' expects a non-negative integer, got '" + e.value + "'");
    }
    return v;
}

bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e.line, "'" + key + "' expects true or false, got '" + e.value + "'");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) items.push_back(trim(item));
    return items;
}

class Reader {
public:
    Reader(const std::map<std::string, Section>& sections, std::string name)
        : name_(std::move(name)) {
        const auto it = sections.find(name_);
        if (it != sections.end()) section_ = &it->second;
    }

    bool present() const { return section_ != nullptr; }
    int line() const { return section_ != nullptr ? section_->line : 0; }

    const Entry* find(const std::string& key) const {
        if (section_ == nullptr) return nullptr;
        const auto it = section_->keys.find(key);
        return it == section_->keys.end() ? nullptr : &it->second;
    }

    const Entry& require(const std::string& key) const {
        const Entry* e = find(key);
        if (e == nullptr) fail(line(), "section [" + name_ + "] is missing key '" + key + "'");
        return *e;
    }

    void real(const std::string& key, double& out) const {
        if (const Entry* e = find(key)) out = to_real(*e, key);
    }
    void count(const std::string& key, std::size_t& out) const {
        if (const Entry* e = find(key)) out = static_cast<std::size_t>(to_unsigned(*e, key));
    }
    void u64(const std::string& key, std::uint64_t& out) const {
        if (const Entry* e = find(key)) out = to_unsigned(*e, key);
    }
    void flag(const std::string& key, bool& out) const {
        if (const Entry* e = find(key)) out = to_bool(*e, key);
    }
    void text(const std::string& key, std::string& out) const {
        if (const Entry* e = find(key)) out = e->value;
    }

    int line_of(const std::string& key) const {
        const Entry* e = find(key);
        return e != nullptr ? e->line : line();
    }

private:
    std::string name_;
    const Section* section_ = nullptr;
};

void check(bool ok, int line, const std::string& msg) {
    if (!ok) fail(line, msg);
}

void check_choice(const Reader& r, const std::string& key, const std::string& value,
                  std::initializer_list<const char*> choices) {
    for (const char* c : choices) {
        if (value == c) return;
    }
    std::string list;
    for (const char* c : choices) list += std::string(list.empty() ? "" : ", ") + c;
    fail(r.line_of(key), "'" + key + "' must be one of " + list + ", got '" + value + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    const auto sections = tokenize(text);
    for (const char* required : {"domain", "time", "reaction", "constraint"}) {
        if (!sections.count(required)) fail(0, std::string("missing section [") + required + "]");
    }
    ExperimentConfig cfg;

    const Reader dom(sections, "domain");
    DomainSection& d = cfg.domain;
    d.xmin = to_real(dom.require("xmin"), "xmin");
    d.xmax = to_real(dom.require("xmax"), "xmax");
    d.nx = static_cast<std::size_t>(to_unsigned(dom.require("nx"), "nx"));
    check(d.xmax > d.xmin, dom.line_of("xmax"), "xmax must exceed xmin");
    check(d.nx >= 3, dom.line_of("nx"), "nx must be at least 3");
    const bool any_y = dom.find("ymin") || dom.find("ymax") || dom.find("ny");
    if (any_y) {
        d.ymin = to_real(dom.require("ymin"), "ymin");
        d.ymax = to_real(dom.require("ymax"), "ymax");
        d.ny = static_cast<std::size_t>(to_unsigned(dom.require("ny"), "ny"));
        check(*d.ymax > *d.ymin, dom.line_of("ymax"), "ymax must exceed ymin");
        check(*d.ny >= 3, dom.line_of("ny"), "ny must be at least 3");
    }

    const Reader tm(sections, "time");
    TimeSection& t = cfg.time;
    t.T = to_real(tm.require("T"), "T");
    check(t.T > 0.0, tm.line_of("T"), "T must be positive");
    tm.text("mesh", t.mesh);
    check_choice(tm, "mesh", t.mesh, {"uniform", "graded"});
    if (t.mesh == "uniform") {
        t.nt = static_cast<std::size_t>(to_unsigned(tm.require("nt"), "nt"));
        check(t.nt >= 1, tm.line_of("nt"), "nt must be at least 1");
    } else {
        tm.count("nt", t.nt);
        t.dt_min = to_real(tm.require("dt_min"), "dt_min");
        t.dt_max = to_real(tm.require("dt_max"), "dt_max");
        tm.real("ratio", t.ratio);
        check(t.dt_min > 0.0, tm.line_of("dt_min"), "dt_min must be positive");
        check(t.dt_max >= t.dt_min, tm.line_of("dt_max"), "dt_max must be at least dt_min");
        check(t.ratio > 1.0, tm.line_of("ratio"), "ratio must exceed 1");
    }

    const Reader rx(sections, "reaction");
    ReactionSection& r = cfg.reaction;
    r.kind = rx.require("kind").value;
    check_choice(rx, "kind", r.kind, {"bistable", "monostable", "convex_power", "cubic"});
    rx.real("theta", r.theta);
    rx.real("exponent", r.exponent);
    rx.real("c3", r.c3);
    rx.real("c2", r.c2);
    rx.real("c1", r.c1);
    rx.real("c0", r.c0);
    if (r.kind == "bistable" || r.kind == "monostable") {
        check(r.theta > 0.0 && r.theta < 1.0, rx.line_of("theta"), "theta must lie in (0, 1)");
    }
    if (r.kind == "convex_power") check(r.exponent > 1.0, rx.line_of("exponent"), "exponent must exceed 1");

    const Reader con(sections, "constraint");
    cfg.mass = to_real(con.require("mass"), "mass");
    check(cfg.mass > 0.0, con.line_of("mass"), "mass must be positive");
    const double measure = d.grid().measure();
    if (!(cfg.mass < measure)) {
        std::ostringstream os;
        os.precision(17);
        os << "mass exceeds |Ω| (mass " << cfg.mass << ", |Ω| = " << measure << ")";
        fail(con.line_of("mass"), os.str());
    }

    const Reader ini(sections, "initial");
    InitialSection& in = cfg.initial;
    ini.text("shape", in.shape);
    check_choice(ini, "shape", in.shape, {"block", "ball", "stripe", "constant", "random", "file"});
    in.cx = 0.5 * (d.xmin + d.xmax);
    in.cy = d.is_2d() ? 0.5 * (*d.ymin + *d.ymax) : 0.0;
    ini.real("cx", in.cx);
    ini.real("cy", in.cy);
    ini.text("path", in.path);
    if (in.shape == "file") check(!in.path.empty(), ini.line_of("shape"), "shape = file needs 'path'");
    if (in.shape == "block") check(!d.is_2d(), ini.line_of("shape"), "shape = block is 1D only");
    if (in.shape == "ball" || in.shape == "stripe") {
        check(d.is_2d(), ini.line_of("shape"), "shape = " + in.shape + " is 2D only");
    }

    const Reader op(sections, "optimizer");
    OptimizerSection& o = cfg.optimizer;
    op.text("method", o.method);
    check_choice(op, "method", o.method, {"fixed_point", "anneal"});
    op.count("max_iter", o.max_iter);
    op.real("tol", o.tol);
    op.count("patience", o.patience);
    op.real("eps_flat", o.eps_flat);
    op.text("root_rule", o.root_rule);
    check_choice(op, "root_rule", o.root_rule, {"concave", "convex"});
    op.flag("cleanup", o.cleanup);
    op.u64("seed", o.seed);
    op.count("seed_count", o.seed_count);
    op.real("initial_temp", o.initial_temp);
    op.real("cooling", o.cooling);
    op.count("moves_per_temp", o.moves_per_temp);
    op.real("move_mass", o.move_mass);
    op.count("cell_nodes", o.cell_nodes);
    op.count("max_evaluations", o.max_evaluations);
    check(o.tol > 0.0, op.line_of("tol"), "tol must be positive");
    check(o.patience >= 1, op.line_of("patience"), "patience must be at least 1");
    check(o.eps_flat >= 0.0, op.line_of("eps_flat"), "eps_flat must be non-negative");
    check(o.seed_count >= 1, op.line_of("seed_count"), "seed_count must be at least 1");
    check(o.initial_temp >= 0.0, op.line_of("initial_temp"), "initial_temp must be non-negative");
    check(o.cooling > 0.0 && o.cooling < 1.0, op.line_of("cooling"), "cooling must lie in (0, 1)");
    check(o.moves_per_temp >= 1, op.line_of("moves_per_temp"), "moves_per_temp must be at least 1");
    check(o.move_mass >= 0.0, op.line_of("move_mass"), "move_mass must be non-negative");
    check(o.cell_nodes >= 1, op.line_of("cell_nodes"), "cell_nodes must be at least 1");

    const Reader out(sections, "output");
    out.text("dir", cfg.output.dir);
    out.count("snapshot_stride", cfg.output.snapshot_stride);
    out.flag("timing", cfg.output.timing);

    const Reader ts(sections, "twoscale");
    TwoscaleSection& tw = cfg.twoscale;
    ts.real("a", tw.a);
    ts.real("b", tw.b);
    if (const Entry* e = ts.find("k")) {
        tw.k.clear();
        for (const auto& item : split_list(e->value)) {
            const Entry sub{item, e->line};
            const auto v = to_unsigned(sub, "k");
            check(v >= 1 && v < 1000000, e->line, "k values must be positive");
            tw.k.push_back(static_cast<int>(v));
        }
        for (std::size_t i = 1; i < tw.k.size(); ++i) {
            check(tw.k[i] > tw.k[i - 1], e->line, "k values must be strictly increasing");
        }
        check(!tw.k.empty(), e->line, "k list is empty");
    }
    check(tw.a < tw.b, ts.line_of("b"), "twoscale b must exceed a");

    const Reader ck(sections, "check");
    CheckSection& c = cfg.check;
    ck.count("trials", c.trials);
    ck.u64("seed", c.seed);
    ck.count("profiles", c.profiles);
    ck.count("t_samples", c.t_samples);
    ck.count("r_samples", c.r_samples);
    ck.flag("mirror", c.mirror);
    if (const Entry* e = ck.find("epsilons")) {
        c.epsilons.clear();
        for (const auto& item : split_list(e->value)) {
            const double v = to_real(Entry{item, e->line}, "epsilons");
            check(v > 0.0, e->line, "epsilons must be positive");
            c.epsilons.push_back(v);
        }
    }
    check(c.t_samples >= 1 && c.r_samples >= 1, ck.line(), "t_samples and r_samples must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_ini(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto real = [&](const char* k, double v) { kv(k, format_real(v)); };
    auto num = [&](const char* k, std::uint64_t v) { kv(k, std::to_string(v)); };
    auto flag = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };

    os << "[domain]\n";
    real("xmin", cfg.domain.xmin);
    real("xmax", cfg.domain.xmax);
    num("nx", cfg.domain.nx);
    if (cfg.domain.is_2d()) {
        real("ymin", *cfg.domain.ymin);
        real("ymax", *cfg.domain.ymax);
        num("ny", *cfg.domain.ny);
    }
    os << "\n[time]\n";
    real("T", cfg.time.T);
    kv("mesh", cfg.time.mesh);
    num("nt", cfg.time.nt);
    if (cfg.time.mesh == "graded") {
        real("dt_min", cfg.time.dt_min);
        real("dt_max", cfg.time.dt_max);
        real("ratio", cfg.time.ratio);
    }
    os << "\n[reaction]\n";
    kv("kind", cfg.reaction.kind);
    real("theta", cfg.reaction.theta);
    real("exponent", cfg.reaction.exponent);
    real("c3", cfg.reaction.c3);
    real("c2", cfg.reaction.c2);
    real("c1", cfg.reaction.c1);
    real("c0", cfg.reaction.c0);
    os << "\n[constraint]\n";
    real("mass", cfg.mass);
    os << "\n[initial]\n";
    kv("shape", cfg.initial.shape);
    real("cx", cfg.initial.cx);
    real("cy", cfg.initial.cy);
    if (!cfg.initial.path.empty()) kv("path", cfg.initial.path);
    const OptimizerSection& o = cfg.optimizer;
    os << "\n[optimizer]\n";
    kv("method", o.method);
    num("max_iter", o.max_iter);
    real("tol", o.tol);
    num("patience", o.patience);
    real("eps_flat", o.eps_flat);
    kv("root_rule", o.root_rule);
    flag("cleanup", o.cleanup);
    num("seed", o.seed);
    num("seed_count", o.seed_count);
    real("initial_temp", o.initial_temp);
    real("cooling", o.cooling);
    num("moves_per_temp", o.moves_per_temp);
    real("move_mass", o.move_mass);
    num("cell_nodes", o.cell_nodes);
    num("max_evaluations", o.max_evaluations);
    os << "\n[output]\n";
    kv("dir", cfg.output.dir);
    num("snapshot_stride", cfg.output.snapshot_stride);
    flag("timing", cfg.output.timing);
    os << "\n[twoscale]\n";
    real("a", cfg.twoscale.a);
    real("b", cfg.twoscale.b);
    std::string ks;
    for (int k : cfg.twoscale.k) ks += (ks.empty() ? "" : ", ") + std::to_string(k);
    kv("k", ks);
    os << "\n[check]\n";
    num("trials", cfg.check.trials);
    num("seed", cfg.check.seed);
    num("profiles", cfg.check.profiles);
    num("t_samples", cfg.check.t_samples);
    num("r_samples", cfg.check.r_samples);
    flag("mirror", cfg.check.mirror);
    std::string eps;
    for (double e : cfg.check.epsilons) eps += (eps.empty() ? "" : ", ") + format_real(e);
    kv("epsilons", eps);
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig keyed = cfg;
    keyed.output.dir.clear();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : to_ini(keyed)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

ScalarField make_initial(const ExperimentConfig& cfg) {
    const Grid grid = cfg.domain.grid();
    const InitialSection& in = cfg.initial;
    if (in.shape == "block") return centered_block(grid, cfg.mass, in.cx);
    if (in.shape == "ball") return disc_indicator(grid, cfg.mass, in.cx, in.cy);
    if (in.shape == "stripe") return stripe_indicator(grid, cfg.mass, in.cx);
    if (in.shape == "constant") return constant_field(grid, cfg.mass / grid.measure());
    if (in.shape == "random") return random_interior_field(grid, cfg.check.seed);
    ScalarField u = load_field(in.path);
    if (!(u.grid == grid)) throw ConfigError("initial field '" + in.path + "' does not match [domain]");
    if (std::abs(mass(u) - cfg.mass) > 1e-8 * std::max(1.0, cfg.mass)) {
        throw ConfigError("initial field '" + in.path + "' does not carry the configured mass");
    }
    return u;
}

}  // namespace rdseed
