#include "eyewit/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eyewit/error.hpp"

namespace eyewit {

namespace {

using json = nlohmann::json;

std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

// Reads the fields of one JSON object and rejects anything not read.
class Section {
  public:
    Section(const json *j, std::string path) : j_(j), path_(std::move(path)) {
        require(j_ == nullptr || j_->is_object(), ErrorCode::validation_error,
                (path_.empty() ? std::string("document") : path_) + " must be an object");
    }

    ~Section() noexcept(false) {
        if (j_ == nullptr || std::uncaught_exceptions() > 0) return;
        for (const auto &[key, value] : j_->items()) {
            require(seen_.count(key) != 0, ErrorCode::validation_error, "unknown field '" + join(path_, key) + "'");
        }
    }

    Section(const Section &) = delete;
    Section &operator=(const Section &) = delete;

    Section sub(const std::string &key) { return Section(find(key), join(path_, key)); }

    const json *find(const std::string &key) {
        seen_.insert(key);
        if (j_ == nullptr) return nullptr;
        const auto it = j_->find(key);
        return it == j_->end() ? nullptr : &*it;
    }

    std::string field(const std::string &key) const { return join(path_, key); }

    void number(const std::string &key, double &out) {
        if (const json *v = find(key)) {
            require(v->is_number(), ErrorCode::validation_error, "field '" + field(key) + "' must be a number");
            out = v->get<double>();
            require(std::isfinite(out), ErrorCode::validation_error, "field '" + field(key) + "' must be finite");
        }
    }

    template <typename Int>
    void integer(const std::string &key, Int &out) {
        if (const json *v = find(key)) {
            bool ok = v->is_number_integer();
            if (!ok && v->is_number_float()) {
                const double d = v->get<double>();
                ok = std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
            }
            require(ok, ErrorCode::validation_error, "field '" + field(key) + "' must be an integer");
            if (v->is_number_unsigned()) {
                out = static_cast<Int>(v->get<std::uint64_t>());
            } else if (v->is_number_integer()) {
                out = static_cast<Int>(v->get<std::int64_t>());
            } else {
                out = static_cast<Int>(v->get<double>());
            }
        }
    }

    void boolean(const std::string &key, bool &out) {
        if (const json *v = find(key)) {
            require(v->is_boolean(), ErrorCode::validation_error, "field '" + field(key) + "' must be true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string &key, std::string &out) {
        if (const json *v = find(key)) {
            require(v->is_string(), ErrorCode::validation_error, "field '" + field(key) + "' must be a string");
            out = v->get<std::string>();
        }
    }

    void amplitude(const std::string &key, ComplexAmplitude &out) {
        const json *v = find(key);
        if (v == nullptr) return;
        if (v->is_number()) {
            out = {v->get<double>(), 0.0};
            return;
        }
        Section s(v, field(key));
        double re = 0.0;
        double im = 0.0;
        s.number("re", re);
        s.number("im", im);
        out = {re, im};
    }

  private:
    const json *j_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool cond, const std::string &field, const std::string &rule) {
    require(cond, ErrorCode::validation_error, "'" + field + "' " + rule);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

ClassicalStrategy parse_strategy(const std::string &s, const std::string &field) {
    if (s == "scan") return ClassicalStrategy::scan;
    if (s == "projected") return ClassicalStrategy::projected;
    fail(ErrorCode::validation_error, "'" + field + "' must be \"scan\" or \"projected\"");
}

const char *strategy_name(ClassicalStrategy s) { return s == ClassicalStrategy::scan ? "scan" : "projected"; }

void read_scan(Section &s, ClassicalScan &scan) {
    s.integer("ps_points", scan.ps_points);
    s.integer("pc_points", scan.pc_points);
    s.number("ps_min", scan.ps_min);
    s.number("ps_max", scan.ps_max);
    s.boolean("include_projected", scan.include_projected);
    check(scan.ps_points >= 1 && scan.pc_points >= 1, s.field("ps_points/pc_points"), "must be >= 1");
    check(scan.ps_min > 0.0 && scan.ps_max < 1.0 && scan.ps_min <= scan.ps_max, s.field("ps_min/ps_max"),
          "must satisfy 0 < ps_min <= ps_max < 1");
}

json amplitude_json(ComplexAmplitude a) { return json{{"re", a.real()}, {"im", a.imag()}}; }

json scan_json(const ClassicalScan &s) {
    return json{{"ps_points", s.ps_points},
                {"pc_points", s.pc_points},
                {"ps_min", s.ps_min},
                {"ps_max", s.ps_max},
                {"include_projected", s.include_projected}};
}

}  // namespace

OptimizationSpec RunConfig::default_optimizer_spec() {
    OptimizationSpec spec;
    spec.objective = ObjectiveKind::expected_runs;
    spec.epsilon = 0.01;
    spec.coarse_n = 50000;
    spec.stop_tail = 1e-3;
    spec.bounds = default_bounds();
    return spec;
}

ChainConfig RunConfig::chain() const {
    ChainConfig c;
    c.eye = eye;
    c.prep = prep;
    c.alpha = alpha;
    c.bs_reflectance = bs_reflectance;
    c.tail_tol = tail_tol;
    c.align_phase = align_phase;
    return c;
}

CriticalOptions RunConfig::critical() const {
    CriticalOptions o;
    o.strategy = strategy;
    o.scan = scan;
    o.rel_tol = critical_rel_tol;
    return o;
}

ExpectedRunsOptions RunConfig::expected_runs_options() const {
    ExpectedRunsOptions o;
    o.critical = critical();
    o.stop_tail = stop_tail;
    return o;
}

SimulationOptions RunConfig::simulation() const {
    SimulationOptions o;
    o.trials = trials;
    o.master_seed = seed;
    o.threads = threads;
    return o;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    bool blank = true;
    for (const char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            blank = false;
            break;
        }
    }
    if (!blank) {
        try {
            doc = json::parse(text.begin(), text.end(), nullptr, true, true);
        } catch (const json::parse_error &e) {
            std::size_t line = 1;
            std::size_t col = 1;
            const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
            for (std::size_t i = 0; i < stop; ++i) {
                if (text[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            std::string what = e.what();
            const auto pos = what.find("syntax error");
            if (pos != std::string::npos) what = what.substr(pos);
            fail(ErrorCode::parse_error,
                 "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
        }
    } else {
        doc = json::object();
    }

    RunConfig c;
    {
        Section root(&doc, "");
        {
            Section s = root.sub("eye");
            s.integer("theta", c.eye.theta);
            s.number("eta", c.eye.eta);
            s.number("dark_mean", c.eye.dark_mean);
            check(c.eye.theta >= 1, s.field("theta"), "must be >= 1");
            check(unit(c.eye.eta), s.field("eta"), "must lie in [0, 1]");
            check(c.eye.dark_mean >= 0.0, s.field("dark_mean"), "must be >= 0");
        }
        {
            Section s = root.sub("preparation");
            s.number("eta_c", c.prep.eta_c);
            s.number("t", c.prep.t);
            s.amplitude("beta", c.prep.beta);
            s.number("eta_d", c.prep.eta_d);
            s.integer("reflected_cutoff", c.prep.reflected_cutoff);
            check(unit(c.prep.eta_c), s.field("eta_c"), "must lie in [0, 1]");
            check(unit(c.prep.t), s.field("t"), "must lie in [0, 1]");
            check(unit(c.prep.eta_d), s.field("eta_d"), "must lie in [0, 1]");
            check(std::abs(c.prep.beta) <= kMaxDisplacement, s.field("beta"), "must satisfy |beta| <= 50");
            check(c.prep.reflected_cutoff >= 4 && c.prep.reflected_cutoff <= 4096, s.field("reflected_cutoff"),
                  "must lie in [4, 4096]");
        }
        {
            Section s = root.sub("witness");
            s.amplitude("alpha", c.alpha);
            s.boolean("align_phase", c.align_phase);
            s.number("bs_reflectance", c.bs_reflectance);
            s.number("tail_tol", c.tail_tol);
            check(std::abs(c.alpha) <= kMaxDisplacement, s.field("alpha"), "must satisfy |alpha| <= 50");
            check(unit(c.bs_reflectance), s.field("bs_reflectance"), "must lie in [0, 1]");
            check(c.tail_tol > 0.0 && c.tail_tol <= 1e-4, s.field("tail_tol"), "must lie in (0, 1e-4]");
        }
        {
            Section s = root.sub("statistics");
            s.number("epsilon", c.epsilon);
            s.integer("coarse_n", c.coarse_n);
            s.number("a", c.a);
            s.number("stop_tail", c.stop_tail);
            s.number("critical_rel_tol", c.critical_rel_tol);
            std::string strategy = strategy_name(c.strategy);
            s.string("strategy", strategy);
            c.strategy = parse_strategy(strategy, s.field("strategy"));
            {
                Section scan = s.sub("scan");
                read_scan(scan, c.scan);
            }
            check(c.epsilon > 0.0 && c.epsilon <= 0.5, s.field("epsilon"), "must lie in (0, 0.5]");
            check(c.coarse_n >= 1, s.field("coarse_n"), "must be >= 1");
            check(c.a >= 0.0, s.field("a"), "must be >= 0");
            check(c.stop_tail > 0.0 && c.stop_tail < 1.0, s.field("stop_tail"), "must lie in (0, 1)");
            check(c.critical_rel_tol > 0.0 && c.critical_rel_tol < 1.0, s.field("critical_rel_tol"),
                  "must lie in (0, 1)");
        }
        {
            Section s = root.sub("simulation");
            s.integer("seed", c.seed);
            s.integer("trials", c.trials);
            s.integer("threads", c.threads);
            check(c.trials >= 1, s.field("trials"), "must be >= 1");
            check(c.threads >= 1, s.field("threads"), "must be >= 1");
        }
        {
            Section s = root.sub("optimizer");
            auto &o = c.optimizer;
            std::string objective = o.objective == ObjectiveKind::p_stop ? "p_stop" : "expected_runs";
            s.string("objective", objective);
            check(objective == "p_stop" || objective == "expected_runs", s.field("objective"),
                  "must be \"expected_runs\" or \"p_stop\"");
            o.objective = objective == "p_stop" ? ObjectiveKind::p_stop : ObjectiveKind::expected_runs;
            s.number("epsilon", o.epsilon);
            s.integer("fixed_n", o.fixed_n);
            s.integer("coarse_n", o.coarse_n);
            s.number("stop_tail", o.stop_tail);
            s.integer("max_runs", o.max_runs);
            s.number("critical_rel_tol", o.critical_rel_tol);
            std::string strategy = strategy_name(o.strategy);
            s.string("strategy", strategy);
            o.strategy = parse_strategy(strategy, s.field("strategy"));
            s.integer("budget", o.options.budget);
            s.number("xtol", o.options.xtol);
            s.number("ftol", o.options.ftol);
            if (const json *b = s.find("bounds")) {
                Section bounds(b, s.field("bounds"));
                o.bounds.clear();
                for (const char *name : {"alpha", "beta", "a", "t"}) {
                    const json *entry = bounds.find(name);
                    if (entry == nullptr) continue;
                    Section e(entry, bounds.field(name));
                    ParameterBound pb{name, 0.0, 0.0, 2};
                    e.number("lo", pb.lo);
                    e.number("hi", pb.hi);
                    e.integer("points", pb.grid_points);
                    check(pb.lo < pb.hi, bounds.field(name), "must satisfy lo < hi");
                    check(pb.grid_points >= 1, e.field("points"), "must be >= 1");
                    o.bounds.push_back(pb);
                }
            }
            {
                Section scan = s.sub("scan");
                read_scan(scan, o.scan);
            }
            check(o.epsilon > 0.0 && o.epsilon <= 0.5, s.field("epsilon"), "must lie in (0, 0.5]");
            check(o.fixed_n >= 1 && o.coarse_n >= 1, s.field("fixed_n/coarse_n"), "must be >= 1");
            check(o.max_runs >= 1, s.field("max_runs"), "must be >= 1");
            check(o.options.budget >= 1, s.field("budget"), "must be >= 1");
            check(!o.bounds.empty(), s.field("bounds"), "must name at least one parameter");
        }
        {
            Section s = root.sub("rates");
            auto &r = c.rates;
            s.number("rep_rate", r.rep_rate);
            s.number("duty_cycle", r.duty_cycle);
            s.number("p_pair", r.p_pair);
            s.number("eta_herald", r.eta_herald);
            s.number("noise_over_signal", r.noise_over_signal);
            s.number("extinction_ratio", r.extinction_ratio);
            s.number("run_rate", r.run_rate);
            check(r.rep_rate >= 0.0, s.field("rep_rate"), "must be >= 0");
            check(unit(r.duty_cycle), s.field("duty_cycle"), "must lie in [0, 1]");
            check(unit(r.p_pair), s.field("p_pair"), "must lie in [0, 1]");
            check(unit(r.eta_herald), s.field("eta_herald"), "must lie in [0, 1]");
            check(r.noise_over_signal > 0.0 && r.extinction_ratio > 0.0, s.field("noise_over_signal"),
                  "and extinction_ratio must be > 0");
            check(r.run_rate > 0.0, s.field("run_rate"), "must be > 0");
        }
        {
            Section s = root.sub("limits");
            s.integer("max_window", c.limits.max_window);
            s.integer("max_runs", c.limits.max_runs);
            s.integer("max_fock_cutoff", c.limits.max_fock_cutoff);
            check(c.limits.max_window >= 1, s.field("max_window"), "must be >= 1");
            check(c.limits.max_runs >= 1, s.field("max_runs"), "must be >= 1");
            check(c.limits.max_fock_cutoff >= 16, s.field("max_fock_cutoff"), "must be >= 16");
        }
    }
    c.prep.validate();
    c.eye.validate();
    return c;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::parse_error, "cannot read configuration file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig &c) {
    json bounds = json::object();
    for (const auto &b : c.optimizer.bounds) bounds[b.name] = {{"lo", b.lo}, {"hi", b.hi}, {"points", b.grid_points}};
    const auto &o = c.optimizer;
    json doc = {
        {"eye", {{"theta", c.eye.theta}, {"eta", c.eye.eta}, {"dark_mean", c.eye.dark_mean}}},
        {"preparation",
         {{"eta_c", c.prep.eta_c},
          {"t", c.prep.t},
          {"beta", amplitude_json(c.prep.beta)},
          {"eta_d", c.prep.eta_d},
          {"reflected_cutoff", c.prep.reflected_cutoff}}},
        {"witness",
         {{"alpha", amplitude_json(c.alpha)},
          {"align_phase", c.align_phase},
          {"bs_reflectance", c.bs_reflectance},
          {"tail_tol", c.tail_tol}}},
        {"statistics",
         {{"epsilon", c.epsilon},
          {"coarse_n", c.coarse_n},
          {"a", c.a},
          {"stop_tail", c.stop_tail},
          {"critical_rel_tol", c.critical_rel_tol},
          {"strategy", strategy_name(c.strategy)},
          {"scan", scan_json(c.scan)}}},
        {"simulation", {{"seed", c.seed}, {"trials", c.trials}, {"threads", c.threads}}},
        {"optimizer",
         {{"objective", o.objective == ObjectiveKind::p_stop ? "p_stop" : "expected_runs"},
          {"epsilon", o.epsilon},
          {"fixed_n", o.fixed_n},
          {"coarse_n", o.coarse_n},
          {"stop_tail", o.stop_tail},
          {"max_runs", o.max_runs},
          {"critical_rel_tol", o.critical_rel_tol},
          {"strategy", strategy_name(o.strategy)},
          {"budget", o.options.budget},
          {"xtol", o.options.xtol},
          {"ftol", o.options.ftol},
          {"bounds", bounds},
          {"scan", scan_json(o.scan)}}},
        {"rates",
         {{"rep_rate", c.rates.rep_rate},
          {"duty_cycle", c.rates.duty_cycle},
          {"p_pair", c.rates.p_pair},
          {"eta_herald", c.rates.eta_herald},
          {"noise_over_signal", c.rates.noise_over_signal},
          {"extinction_ratio", c.rates.extinction_ratio},
          {"run_rate", c.rates.run_rate}}},
        {"limits",
         {{"max_window", c.limits.max_window},
          {"max_runs", c.limits.max_runs},
          {"max_fock_cutoff", c.limits.max_fock_cutoff}}},
    };
    return doc.dump(2);
}

std::string config_hash(const RunConfig &config) {
    const std::string canonical = dump_config(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_environment(RunConfig &config) {
    const char *raw = std::getenv(kResourceCeilingEnv);
    if (raw == nullptr || *raw == '\0') return;
    char *end = nullptr;
    const long long v = std::strtoll(raw, &end, 10);
    require(end != raw && *end == '\0' && v >= 1, ErrorCode::validation_error,
            std::string(kResourceCeilingEnv) + " must be a positive integer");
    config.limits.max_runs = v;
    config.optimizer.max_runs = std::min<std::int64_t>(config.optimizer.max_runs, v);
}

}  // namespace eyewit
