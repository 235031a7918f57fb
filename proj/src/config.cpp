#include "csdnls/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace csdnls::app {

namespace {

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw ConfigError(join(path, key), "unknown field");
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(path, key), "missing required field");
    return obj.at(key);
}

const Json& object_at(const Json& obj, const std::string& path, const char* key) {
    const Json& v = require(obj, path, key);
    if (!v.is_object()) throw ConfigError(join(path, key), "expected an object");
    return v;
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

long long integer(const Json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw ConfigError(path, "expected an integer");
}

bool boolean(const Json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

std::complex<double> complex_value(const Json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected {\"re\": ..., \"im\": ...}");
    reject_unknown(v, path, {"re", "im"});
    return {number(require(v, path, "re"), join(path, "re")), number(require(v, path, "im"), join(path, "im"))};
}

template <typename F>
void optional_field(const Json& obj, const std::string& path, const char* key, F&& apply) {
    if (obj.contains(key)) apply(obj.at(key), join(path, key));
}

InitialSpec parse_initial(const Json& init, Index N) {
    const std::string path = "initial";
    reject_unknown(init, path, {"rational", "coeffs", "single_mode"});
    if (init.size() != 1) throw ConfigError(path, "exactly one of rational, coeffs, single_mode is required");

    InitialSpec spec;
    if (init.contains("rational")) {
        const std::string p = "initial.rational";
        const Json& r = init.at("rational");
        if (!r.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(r, p, {"q_re", "q_im", "c_re", "c_im"});
        spec.kind = InitialKind::rational;
        spec.q = {number(require(r, p, "q_re"), p + ".q_re"), number(require(r, p, "q_im"), p + ".q_im")};
        spec.c = {number(require(r, p, "c_re"), p + ".c_re"), number(require(r, p, "c_im"), p + ".c_im")};
        if (std::abs(spec.q) >= 1) throw ConfigError(p, "|q| must be < 1");
    } else if (init.contains("coeffs")) {
        const std::string p = "initial.coeffs";
        const Json& c = init.at("coeffs");
        if (!c.is_array() || c.empty()) throw ConfigError(p, "expected a nonempty array of {re, im}");
        if (Index(c.size()) > N + 1) throw ConfigError(p, "more coefficients than modes 0..N");
        spec.kind = InitialKind::coeffs;
        for (std::size_t i = 0; i < c.size(); ++i)
            spec.coeffs.push_back(complex_value(c[i], p + "[" + std::to_string(i) + "]"));
    } else {
        const std::string p = "initial.single_mode";
        const Json& s = init.at("single_mode");
        if (!s.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(s, p, {"n", "amplitude"});
        spec.kind = InitialKind::single_mode;
        spec.mode = Index(integer(require(s, p, "n"), p + ".n"));
        if (spec.mode < 0 || spec.mode > N) throw ConfigError(p + ".n", "must lie in 0..N");
        spec.amplitude = complex_value(require(s, p, "amplitude"), p + ".amplitude");
    }
    return spec;
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    reject_unknown(doc, "", {"equation", "initial", "time", "method", "diagnostics", "verify", "lambda_shift",
                             "seed", "dealias", "spectrum", "test_hooks"});
    ExperimentConfig cfg;

    const Json& eq = object_at(doc, "", "equation");
    reject_unknown(eq, "equation", {"sign", "N"});
    const Json& sign = require(eq, "equation", "sign");
    if (sign == "focusing")
        cfg.sign = EquationSign::focusing;
    else if (sign == "defocusing")
        cfg.sign = EquationSign::defocusing;
    else
        throw ConfigError("equation.sign", "expected \"focusing\" or \"defocusing\"");
    const long long N = integer(require(eq, "equation", "N"), "equation.N");
    if (N < 4 || N > 4096) throw ConfigError("equation.N", "must lie in 4..4096");
    cfg.N = Index(N);

    cfg.initial = parse_initial(object_at(doc, "", "initial"), cfg.N);

    optional_field(doc, "", "time", [&](const Json& t, const std::string& p) {
        if (!t.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(t, p, {"t_final", "dt", "samples"});
        optional_field(t, p, "t_final", [&](const Json& v, const std::string& q) {
            cfg.time.t_final = number(v, q);
            if (cfg.time.t_final < 0) throw ConfigError(q, "must be nonnegative");
        });
        optional_field(t, p, "dt", [&](const Json& v, const std::string& q) {
            cfg.time.dt = number(v, q);
            if (!(cfg.time.dt > 0)) throw ConfigError(q, "must be positive");
        });
        optional_field(t, p, "samples", [&](const Json& v, const std::string& q) {
            const long long s = integer(v, q);
            if (s < 1 || s > 100000) throw ConfigError(q, "must lie in 1..100000");
            cfg.time.samples = int(s);
        });
    });

    optional_field(doc, "", "method", [&](const Json& v, const std::string& p) {
        if (v == "explicit")
            cfg.method = Method::explicit_formula;
        else if (v == "direct")
            cfg.method = Method::direct;
        else if (v == "both")
            cfg.method = Method::both;
        else
            throw ConfigError(p, "expected \"explicit\", \"direct\" or \"both\"");
    });

    optional_field(doc, "", "diagnostics", [&](const Json& d, const std::string& p) {
        if (!d.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(d, p, {"H_s", "n_track", "birkhoff", "identity_checks"});
        optional_field(d, p, "H_s", [&](const Json& v, const std::string& q) {
            if (!v.is_array()) throw ConfigError(q, "expected an array of numbers");
            cfg.diagnostics.H_s.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double s = number(v[i], q + "[" + std::to_string(i) + "]");
                if (s < 0) throw ConfigError(q + "[" + std::to_string(i) + "]", "must be nonnegative");
                cfg.diagnostics.H_s.push_back(s);
            }
        });
        optional_field(d, p, "n_track", [&](const Json& v, const std::string& q) {
            const long long n = integer(v, q);
            if (n < 0 || n > cfg.N + 1) throw ConfigError(q, "must lie in 0..N+1");
            cfg.diagnostics.n_track = Index(n);
        });
        optional_field(d, p, "birkhoff", [&](const Json& v, const std::string& q) { cfg.diagnostics.birkhoff = boolean(v, q); });
        optional_field(d, p, "identity_checks",
                       [&](const Json& v, const std::string& q) { cfg.diagnostics.identity_checks = boolean(v, q); });
    });

    optional_field(doc, "", "verify", [&](const Json& d, const std::string& p) {
        if (!d.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(d, p, {"random_states", "sharp_pairs", "lipschitz_directions", "lax_time", "lax_dt"});
        auto count = [&](const char* key, int& dst) {
            optional_field(d, p, key, [&](const Json& v, const std::string& q) {
                const long long n = integer(v, q);
                if (n < 1 || n > 1000000) throw ConfigError(q, "must lie in 1..1000000");
                dst = int(n);
            });
        };
        count("random_states", cfg.verify.random_states);
        count("sharp_pairs", cfg.verify.sharp_pairs);
        count("lipschitz_directions", cfg.verify.lipschitz_directions);
        auto positive = [&](const char* key, double& dst) {
            optional_field(d, p, key, [&](const Json& v, const std::string& q) {
                dst = number(v, q);
                if (!(dst > 0)) throw ConfigError(q, "must be positive");
            });
        };
        positive("lax_time", cfg.verify.lax_time);
        positive("lax_dt", cfg.verify.lax_dt);
        if (cfg.verify.lax_dt >= cfg.verify.lax_time) throw ConfigError(p + ".lax_dt", "must be below verify.lax_time");
    });

    optional_field(doc, "", "lambda_shift", [&](const Json& v, const std::string& p) {
        if (v.is_string()) {
            if (v != "auto") throw ConfigError(p, "expected a positive number or \"auto\"");
            cfg.lambda_shift.reset();
        } else {
            const double x = number(v, p);
            if (!(x > 0)) throw ConfigError(p, "must be positive");
            cfg.lambda_shift = x;
        }
    });

    optional_field(doc, "", "seed", [&](const Json& v, const std::string& p) {
        const long long s = integer(v, p);
        if (s < 0) throw ConfigError(p, "must be nonnegative");
        cfg.seed = std::uint64_t(s);
    });
    optional_field(doc, "", "dealias", [&](const Json& v, const std::string& p) { cfg.dealias = boolean(v, p); });
    optional_field(doc, "", "spectrum", [&](const Json& d, const std::string& p) {
        if (!d.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(d, p, {"eigenvectors"});
        optional_field(d, p, "eigenvectors",
                       [&](const Json& v, const std::string& q) { cfg.spectrum_eigenvectors = boolean(v, q); });
    });
    optional_field(doc, "", "test_hooks", [&](const Json& d, const std::string& p) {
        if (!d.is_object()) throw ConfigError(p, "expected an object");
        reject_unknown(d, p, {"corrupt_b_sign"});
        optional_field(d, p, "corrupt_b_sign", [&](const Json& v, const std::string& q) { cfg.corrupt_b_sign = boolean(v, q); });
    });
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON in ") + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

HardyStated ExperimentConfig::initial_state() const {
    switch (initial.kind) {
        case InitialKind::rational: return rational_profile(initial.q, initial.c, N);
        case InitialKind::single_mode: return HardyStated::mode(initial.mode, initial.amplitude, N);
        case InitialKind::coeffs: {
            HardyStated u(N);
            for (std::size_t i = 0; i < initial.coeffs.size(); ++i) u[Index(i)] = initial.coeffs[i];
            return u;
        }
    }
    throw std::logic_error("unreachable initial kind");
}

std::vector<double> ExperimentConfig::sample_times() const {
    if (time.samples == 1) return {time.t_final};
    std::vector<double> t(static_cast<std::size_t>(time.samples));
    for (int k = 0; k < time.samples; ++k) t[std::size_t(k)] = time.t_final * double(k) / double(time.samples - 1);
    t.back() = time.t_final;
    return t;
}

double ExperimentConfig::resolved_lambda_shift() const {
    return lambda_shift ? *lambda_shift : default_lambda_shift(initial_state());
}

FlowConfig ExperimentConfig::flow_config() const {
    FlowConfig f;
    f.sign = sign;
    f.N = N;
    f.t_samples = sample_times();
    f.dt = time.dt;
    f.method = method;
    f.dealias = dealias;
    f.lambda_shift = resolved_lambda_shift();
    return f;
}

Json to_json(const ExperimentConfig& cfg) {
    Json init;
    switch (cfg.initial.kind) {
        case InitialKind::rational:
            init["rational"] = Json{{"q_re", cfg.initial.q.real()},
                                    {"q_im", cfg.initial.q.imag()},
                                    {"c_re", cfg.initial.c.real()},
                                    {"c_im", cfg.initial.c.imag()}};
            break;
        case InitialKind::coeffs: {
            Json arr = Json::array();
            for (auto z : cfg.initial.coeffs) arr.push_back(complex_json(z));
            init["coeffs"] = arr;
            break;
        }
        case InitialKind::single_mode:
            init["single_mode"] = Json{{"n", cfg.initial.mode}, {"amplitude", complex_json(cfg.initial.amplitude)}};
            break;
    }
    Json doc;
    doc["equation"] = Json{{"sign", to_string(cfg.sign)}, {"N", cfg.N}};
    doc["initial"] = init;
    doc["time"] = Json{{"t_final", cfg.time.t_final}, {"dt", cfg.time.dt}, {"samples", cfg.time.samples}};
    doc["method"] = to_string(cfg.method);
    doc["diagnostics"] = Json{{"H_s", cfg.diagnostics.H_s},
                              {"n_track", cfg.diagnostics.n_track},
                              {"birkhoff", cfg.diagnostics.birkhoff},
                              {"identity_checks", cfg.diagnostics.identity_checks}};
    doc["verify"] = Json{{"random_states", cfg.verify.random_states},
                         {"sharp_pairs", cfg.verify.sharp_pairs},
                         {"lipschitz_directions", cfg.verify.lipschitz_directions},
                         {"lax_time", cfg.verify.lax_time},
                         {"lax_dt", cfg.verify.lax_dt}};
    doc["lambda_shift"] = cfg.resolved_lambda_shift();
    doc["seed"] = cfg.seed;
    doc["dealias"] = cfg.dealias;
    doc["spectrum"] = Json{{"eigenvectors", cfg.spectrum_eigenvectors}};
    doc["test_hooks"] = Json{{"corrupt_b_sign", cfg.corrupt_b_sign}};
    return doc;
}

}  // namespace csdnls::app
