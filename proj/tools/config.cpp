#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "nsmild/errors.hpp"

namespace nsmild::cli {
namespace {

// Read-only view of a JSON object that remembers its dotted path and which
// keys were consumed, so leftovers can be reported as unknown fields.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "$" : path_, "must be an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json* raw(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(at(key), "must be a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) fail(at(key), "must be finite");
        return x;
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(at(key), "must be an integer");
        return v->get<long long>();
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
            fail(at(key), "must be a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(at(key), "must be true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(at(key), "must be a string");
        return v->get<std::string>();
    }

    std::optional<Node> child(const std::string& key) {
        const json* v = raw(key);
        if (!v) return std::nullopt;
        return Node(*v, at(key));
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = raw(key);
        if (!v) return {};
        if (!v->is_array() || v->empty()) fail(at(key), "must be a non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            const std::string p = at(key) + "[" + std::to_string(i) + "]";
            if (!e.is_number() || !std::isfinite(e.get<double>())) fail(p, "must be a finite number");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        const json* v = raw(key);
        if (!v) return {};
        if (!v->is_array() || v->empty()) fail(at(key), "must be a non-empty array of integers");
        std::vector<int> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            if (!e.is_number_integer()) fail(at(key) + "[" + std::to_string(i) + "]", "must be an integer");
            out.push_back(e.get<int>());
        }
        return out;
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
        throw ConfigError(path, msg);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) Node::fail(path, msg);
}

// Either an explicit list `<key>` or a log-spaced `<key>_range` {min, max, count}.
std::vector<double> time_list(Node& node, const std::string& key, std::vector<double> fallback) {
    const bool list = node.has(key);
    const bool range = node.has(key + "_range");
    require(!(list && range), node.at(key), "give either " + key + " or " + key + "_range, not both");
    std::vector<double> out = std::move(fallback);
    if (list) out = node.numbers(key);
    if (range) {
        Node r = *node.child(key + "_range");
        const double lo = r.number("min", 0.0);
        const double hi = r.number("max", 0.0);
        const auto count = r.integer("count", 8);
        r.finish();
        require(lo > 0.0, r.at("min"), "must be > 0");
        require(hi >= lo, r.at("max"), "must be >= min");
        require(count >= 1 && count <= 10000, r.at("count"), "must lie in [1, 10000]");
        out = log_spaced(lo, hi, static_cast<int>(count));
    } else {
        node.raw(key + "_range");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        require(out[i] > 0.0, node.at(key) + "[" + std::to_string(i) + "]", "must be > 0");
        if (i > 0) require(out[i] > out[i - 1], node.at(key), "must be strictly increasing");
    }
    return out;
}

ResolutionPolicy parse_policy(Node& node) {
    ResolutionPolicy p;
    if (node.has("resolutions")) {
        p.resolutions = node.integers("resolutions");
        for (std::size_t i = 0; i < p.resolutions.size(); ++i) {
            const std::string path = node.at("resolutions") + "[" + std::to_string(i) + "]";
            const int n = p.resolutions[i];
            require(n >= 4 && n % 2 == 0 && n <= 8192, path, "must be an even integer in [4, 8192]");
            if (i > 0) require(n > p.resolutions[i - 1], path, "resolutions must increase");
        }
    } else {
        node.raw("resolutions");
    }
    p.rel_tol = node.number("rel_tol", p.rel_tol);
    require(p.rel_tol > 0.0, node.at("rel_tol"), "must be > 0");
    p.min_points_per_width = node.number("min_points_per_width", p.min_points_per_width);
    require(p.min_points_per_width >= 0.0, node.at("min_points_per_width"), "must be >= 0");
    return p;
}

SolverConfig parse_solver(Node& root) {
    SolverConfig c;
    auto child = root.child("solver");
    if (!child) return c;
    Node& s = *child;
    const auto n = s.integer("n", c.n);
    require(n >= 4 && n % 2 == 0 && n <= 4096, s.at("n"), "must be an even integer in [4, 4096]");
    c.n = static_cast<int>(n);
    c.dt = s.number("dt", c.dt);
    require(c.dt > 0.0, s.at("dt"), "must be > 0");
    const std::string scheme = s.string("scheme", to_string(c.scheme));
    require(scheme == "picard-exponential" || scheme == "etdrk2", s.at("scheme"),
            "must be \"picard-exponential\" or \"etdrk2\"");
    c.scheme = scheme_from_string(scheme);
    c.picard_tol = s.number("picard_tol", c.picard_tol);
    require(c.picard_tol > 0.0, s.at("picard_tol"), "must be > 0");
    const auto iters = s.integer("picard_max_iters", c.picard_max_iters);
    require(iters >= 1 && iters <= 10000, s.at("picard_max_iters"), "must lie in [1, 10000]");
    c.picard_max_iters = static_cast<int>(iters);
    c.dealias = s.boolean("dealias", c.dealias);
    c.nonlinear = s.boolean("nonlinear", c.nonlinear);
    s.finish();
    return c;
}

InitialSpec parse_initial(Node& root, const std::string& key = "initial") {
    InitialSpec spec;
    auto child = root.child(key);
    if (!child) return spec;
    Node& s = *child;
    const std::string type = s.string("type", "taylor-green");
    if (type == "taylor-green") {
        spec.type = InitialSpec::Type::TaylorGreen;
        spec.amplitude = s.number("amplitude", spec.amplitude);
    } else if (type == "random") {
        spec.type = InitialSpec::Type::Random;
        spec.seed = s.seed("seed", spec.seed);
        spec.sigma = s.number("sigma", spec.sigma);
        require(spec.sigma > 1.0, s.at("sigma"), "must be > 1");
        spec.l2 = s.number("l2", spec.l2);
        require(spec.l2 > 0.0, s.at("l2"), "must be > 0");
    } else if (type == "zero") {
        spec.type = InitialSpec::Type::Zero;
    } else {
        Node::fail(s.at("type"), "must be \"taylor-green\", \"random\" or \"zero\"");
    }
    s.finish();
    return spec;
}

}  // namespace

SpectralVectorField InitialSpec::build(const TorusGrid& g) const {
    switch (type) {
        case Type::TaylorGreen: return taylor_green(g, amplitude);
        case Type::Random: return scaled_to_l2(random_divfree(g, seed, sigma), l2);
        case Type::Zero: {
            SpectralVectorField v(g);
            v.divfree = true;
            return v;
        }
    }
    throw std::logic_error("unknown initial data type");
}

json InitialSpec::to_json() const {
    json j;
    switch (type) {
        case Type::TaylorGreen:
            j["type"] = "taylor-green";
            j["amplitude"] = amplitude;
            break;
        case Type::Random:
            j["type"] = "random";
            j["seed"] = seed;
            j["sigma"] = sigma;
            j["l2"] = l2;
            break;
        case Type::Zero: j["type"] = "zero"; break;
    }
    return j;
}

json solver_json(const SolverConfig& c) {
    return json{{"n", c.n},
                {"dt", c.dt},
                {"scheme", to_string(c.scheme)},
                {"picard_tol", c.picard_tol},
                {"picard_max_iters", c.picard_max_iters},
                {"dealias", c.dealias},
                {"nonlinear", c.nonlinear}};
}

json load_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
}

KernelBoundsConfig parse_kernel_bounds(const json& doc) {
    Node root(doc, "");
    KernelBoundsConfig c;
    c.t_values = time_list(root, "t", log_spaced(1e-3, 1e-1, 16));
    c.policy = parse_policy(root);
    root.finish();
    return c;
}

LorentzConfig parse_lorentz(const json& doc) {
    Node root(doc, "");
    LorentzConfig c;
    const auto n = root.integer("n", c.n);
    require(n >= 16 && n % 2 == 0 && n <= 4096, root.at("n"), "must be an even integer in [16, 4096]");
    c.n = static_cast<int>(n);
    c.first_seed = root.seed("first_seed", c.first_seed);
    const auto fields = root.integer("fields", c.fields);
    require(fields >= 1 && fields <= 1000000, root.at("fields"), "must lie in [1, 1000000]");
    c.fields = static_cast<int>(fields);
    if (root.has("q_values")) c.q_values = root.numbers("q_values");
    else root.raw("q_values");
    for (std::size_t i = 0; i < c.q_values.size(); ++i) {
        require(c.q_values[i] > 1.0 && c.q_values[i] < 2.0, "q_values[" + std::to_string(i) + "]",
                "must lie in (1, 2)");
    }
    const auto pairs = root.integer("product_pairs", c.product_pairs);
    require(pairs >= 0 && pairs <= 1000000, root.at("product_pairs"), "must lie in [0, 1000000]");
    c.product_pairs = static_cast<int>(pairs);
    root.finish();
    return c;
}

SimulateConfig parse_simulate(const json& doc) {
    Node root(doc, "");
    SimulateConfig c;
    c.solver = parse_solver(root);
    c.initial = parse_initial(root);
    c.t_end = root.number("t_end", c.t_end);
    require(c.t_end > 0.0, root.at("t_end"), "must be > 0");
    require(c.t_end / c.solver.dt <= 1e7, root.at("t_end"), "needs more than 1e7 steps");
    c.dump_state = root.boolean("dump_state", c.dump_state);
    root.finish();
    return c;
}

SmoothingConfig parse_smoothing(const json& doc) {
    Node root(doc, "");
    SmoothingConfig c;
    c.solver = parse_solver(root);
    c.initial = parse_initial(root);
    c.T0 = root.number("T0", c.T0);
    require(c.T0 >= 0.0, root.at("T0"), "must be >= 0");
    c.deltas = time_list(root, "delta", log_spaced(1e-3, 1e-1, 9));
    const auto levels = root.integer("levels", c.levels);
    require(levels >= 0 && levels <= 60, root.at("levels"), "must lie in [0, 60]");
    c.levels = static_cast<int>(levels);
    if (auto pair = root.child("pair")) {
        c.pair_eps = pair->number("eps", 1e-3);
        require(*c.pair_eps >= 0.0, pair->at("eps"), "must be >= 0");
        c.pair_seed = pair->seed("seed", c.pair_seed);
        pair->finish();
    }
    root.finish();
    return c;
}

StabilityConfig parse_stability(const json& doc) {
    Node root(doc, "");
    StabilityConfig c;
    c.solver = parse_solver(root);
    auto& cp = c.campaign;
    const auto trials = root.integer("trials", cp.trials);
    require(trials >= 1 && trials <= 100000, root.at("trials"), "must lie in [1, 100000]");
    cp.trials = static_cast<int>(trials);
    cp.first_seed = root.seed("first_seed", cp.first_seed);
    cp.trial.T0 = root.number("T0", cp.trial.T0);
    require(cp.trial.T0 >= 0.0, root.at("T0"), "must be >= 0");
    cp.trial.delta = root.number("delta", cp.trial.delta);
    require(cp.trial.delta > 0.0, root.at("delta"), "must be > 0");
    cp.trial.eps = root.number("eps", cp.trial.eps);
    require(cp.trial.eps >= 0.0, root.at("eps"), "must be >= 0");
    cp.trial.perturbation_sigma = root.number("perturbation_sigma", cp.trial.perturbation_sigma);
    require(cp.trial.perturbation_sigma > 1.0, root.at("perturbation_sigma"), "must be > 1");
    const auto levels = root.integer("levels", cp.trial.levels);
    require(levels >= 0 && levels <= 60, root.at("levels"), "must lie in [0, 60]");
    cp.trial.levels = static_cast<int>(levels);
    cp.trial.kappa_target = root.number("kappa_target", cp.trial.kappa_target);
    require(cp.trial.kappa_target > 0.0 && cp.trial.kappa_target < 1.0, root.at("kappa_target"),
            "must lie in (0, 1)");

    if (auto base = root.child("base")) {
        const std::string type = base->string("type", "random");
        if (type == "random") {
            cp.base = BaseField::Random;
            cp.base_sigma = base->number("sigma", cp.base_sigma);
            require(cp.base_sigma > 1.0, base->at("sigma"), "must be > 1");
            cp.base_l2 = base->number("l2", cp.base_l2);
            require(cp.base_l2 > 0.0, base->at("l2"), "must be > 0");
        } else if (type == "taylor-green") {
            cp.base = BaseField::TaylorGreen;
            cp.base_l2 = base->number("amplitude", 1.0);
        } else {
            Node::fail(base->at("type"), "must be \"random\" or \"taylor-green\"");
        }
        base->finish();
    }

    const json* ch = root.raw("C_hat");
    if (ch && ch->is_number()) {
        c.c_hat.value = ch->get<double>();
        require(*c.c_hat.value > 0.0 && std::isfinite(*c.c_hat.value), "C_hat", "must be > 0");
    } else if (ch && !ch->is_object()) {
        Node::fail("C_hat", "must be a number or an estimation object");
    }
    if (ch && ch->is_object()) {
        Node est(*ch, "C_hat");
        c.c_hat.t_values = time_list(est, "t", log_spaced(1e-3, 1e-2, 8));
        c.c_hat.policy = parse_policy(est);
        est.finish();
    } else if (!c.c_hat.value) {
        c.c_hat.t_values = log_spaced(1e-3, 1e-2, 8);
    }
    for (std::size_t i = 0; i < c.c_hat.t_values.size(); ++i) {
        require(c.c_hat.t_values[i] <= 1.0, "C_hat.t[" + std::to_string(i) + "]", "must lie in (0, 1]");
    }
    root.finish();
    return c;
}

SelftestConfig parse_selftest(const json& doc) {
    Node root(doc, "");
    root.finish();
    return {};
}

void apply_seed(LorentzConfig& c, std::uint64_t seed) { c.first_seed = seed; }
void apply_seed(SimulateConfig& c, std::uint64_t seed) { c.initial.seed = seed; }
void apply_seed(SmoothingConfig& c, std::uint64_t seed) {
    c.initial.seed = seed;
    c.pair_seed = seed;
}
void apply_seed(StabilityConfig& c, std::uint64_t seed) { c.campaign.first_seed = seed; }

}  // namespace nsmild::cli
