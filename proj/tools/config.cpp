#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <sstream>

#include "weylforge/builtins.hpp"

namespace weylforge::cli {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "\n") + s;
    return out;
}

// Collects errors with their paths; throw_if_any() raises them together.
struct Errors {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& msg) { list.push_back(path + ": " + msg); }
    void throw_if_any() const {
        if (!list.empty()) throw ConfigError(list);
    }
};

double number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    throw ConfigError({path + ": expected a number"});
}

cd complex_entry(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string()) {
        try {
            return parse_complex(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError({path + ": " + e.what()});
        }
    }
    throw ConfigError({path + ": expected a number, [re, im] or a complex string"});
}

std::vector<Mat> matrix_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError({path + ": expected a nonempty list of matrices"});
    std::vector<Mat> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_matrix(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

bool hermitian(const Mat& m) { return norm2(m - m.adjoint()) <= 1e-12 * (1.0 + norm2(m)); }

Polynomial polynomial(const json& j, const std::string& path) {
    if (j.is_number()) return Polynomial::constant(j.get<double>());
    if (!j.is_array() || j.empty()) throw ConfigError({path + ": expected coefficient list"});
    Polynomial p;
    for (std::size_t k = 0; k < j.size(); ++k) p.c.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    return p;
}

std::pair<double, double> interval(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ConfigError({path + ": expected [a, b]"});
    const double a = number(j[0], path + "[0]");
    const double b = j[1].is_null() ? std::numeric_limits<double>::infinity() : number(j[1], path + "[1]");
    if (!(a < b)) throw ConfigError({path + ": need a < b"});
    return {a, b};
}

SymmetricSystem custom_system(const json& doc, Errors& err) {
    const json& lay = doc.at("layout");
    if (!lay.is_object() || !lay.contains("nu_plus") || !lay.contains("nu_hat"))
        throw ConfigError({"layout: expected {nu_plus, nu_hat}"});
    SpaceLayout layout{lay["nu_plus"].get<int>(), lay["nu_hat"].get<int>()};
    if (layout.nu_plus < 0 || layout.nu_hat < 0 || layout.dim() == 0)
        throw ConfigError({"layout: dimensions must be nonnegative and not both zero"});
    const int n = layout.dim();
    if (!doc.contains("coefficients")) throw ConfigError({"coefficients: missing"});
    const json& co = doc["coefficients"];
    const std::string rep = co.value("representation", "constant");
    auto check_dims = [&](const Mat& m, const std::string& path) {
        if (m.rows() != n || m.cols() != n) err.add(path, "expected " + std::to_string(n) + "x" + std::to_string(n));
    };
    CoefficientField field;
    if (rep == "constant") {
        const Mat B = parse_matrix(co.at("B"), "coefficients.B");
        const Mat D = parse_matrix(co.at("Delta"), "coefficients.Delta");
        check_dims(B, "coefficients.B");
        check_dims(D, "coefficients.Delta");
        if (B.rows() == B.cols() && !hermitian(B)) err.add("coefficients.B", "not Hermitian");
        if (D.rows() == D.cols() && !hermitian(D)) err.add("coefficients.Delta", "not Hermitian");
        err.throw_if_any();
        field = CoefficientField::constant(B, D);
    } else if (rep == "polynomial") {
        auto B = matrix_list(co.at("B"), "coefficients.B");
        auto D = matrix_list(co.at("Delta"), "coefficients.Delta");
        for (std::size_t k = 0; k < B.size(); ++k) {
            const std::string p = "coefficients.B[" + std::to_string(k) + "]";
            check_dims(B[k], p);
            if (B[k].rows() == B[k].cols() && !hermitian(B[k])) err.add(p, "not Hermitian");
        }
        for (std::size_t k = 0; k < D.size(); ++k) {
            const std::string p = "coefficients.Delta[" + std::to_string(k) + "]";
            check_dims(D[k], p);
            if (D[k].rows() == D[k].cols() && !hermitian(D[k])) err.add(p, "not Hermitian");
        }
        err.throw_if_any();
        field = CoefficientField::polynomial(std::move(B), std::move(D));
    } else if (rep == "tabulated") {
        const json& t = co.at("t");
        std::vector<double> ts;
        for (std::size_t k = 0; k < t.size(); ++k) ts.push_back(number(t[k], "coefficients.t[" + std::to_string(k) + "]"));
        auto B = matrix_list(co.at("B"), "coefficients.B");
        auto D = matrix_list(co.at("Delta"), "coefficients.Delta");
        for (std::size_t k = 0; k < B.size(); ++k) {
            const std::string p = "coefficients.B[" + std::to_string(k) + "]";
            check_dims(B[k], p);
            if (B[k].rows() == B[k].cols() && !hermitian(B[k])) err.add(p, "not Hermitian");
        }
        for (std::size_t k = 0; k < D.size(); ++k) check_dims(D[k], "coefficients.Delta[" + std::to_string(k) + "]");
        if (B.size() != ts.size() || D.size() != ts.size()) err.add("coefficients", "sample count mismatch");
        err.throw_if_any();
        try {
            field = CoefficientField::tabulated(std::move(ts), std::move(B), std::move(D));
        } catch (const std::invalid_argument& e) {
            throw ConfigError({std::string("coefficients: ") + e.what()});
        }
    } else {
        throw ConfigError({"coefficients.representation: unknown '" + rep + "'"});
    }
    const auto [a, b] = interval(doc.at("interval"), "interval");
    const bool b_regular = doc.value("b_regular", std::isfinite(b));
    Mat xa = doc.contains("X_a") ? parse_matrix(doc["X_a"], "X_a") : identity(n);
    std::optional<Mat> xb;
    if (doc.contains("X_b")) xb = parse_matrix(doc["X_b"], "X_b");
    try {
        SymmetricSystem sys = make_system(layout, std::move(field), a, b, b_regular, xa, xb);
        const double hi = std::isfinite(b) ? b : a + 10.0;
        std::vector<double> ts;
        for (int k = 0; k <= 16; ++k) ts.push_back(a + (hi - a) * k / 16.0);
        for (const auto& v : validate_system(sys, ts).violations) {
            std::ostringstream os;
            os << v.what << " at t=" << v.t;
            err.add(v.what.rfind("B", 0) == 0 ? "coefficients.B" : "coefficients.Delta", os.str());
        }
        err.throw_if_any();
        return sys;
    } catch (const std::invalid_argument& e) {
        throw ConfigError({std::string("system: ") + e.what()});
    }
}

OddOrderExpression odd_expression(const json& j) {
    OddOrderExpression e;
    e.n = j.at("n").get<int>();
    if (e.n != 0 && e.n != 1) throw ConfigError({"odd_order.n: supported orders are n = 0 and n = 1"});
    const std::size_t m = static_cast<std::size_t>(e.n + 1);
    for (const char* key : {"p", "q"}) {
        const std::string path = std::string("odd_order.") + key;
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != m)
            throw ConfigError({path + ": expected " + std::to_string(m) + " coefficient polynomials"});
        auto& dst = key[0] == 'p' ? e.p : e.q;
        for (std::size_t k = 0; k < m; ++k) dst.push_back(polynomial(j[key][k], path + "[" + std::to_string(k) + "]"));
    }
    if (j.contains("w")) e.w = polynomial(j["w"], "odd_order.w");
    if (j.contains("interval")) std::tie(e.a, e.b) = interval(j["interval"], "odd_order.interval");
    return e;
}

TauSpec tau_spec(const json& j) {
    TauSpec s;
    if (j.is_null()) return s;
    if (j.is_string()) {
        const std::string v = j.get<std::string>();
        if (v == "dirichlet") s.kind = TauSpec::Kind::dirichlet;
        else if (v == "neumann") s.kind = TauSpec::Kind::neumann;
        else if (v == "auto") s.kind = TauSpec::Kind::automatic;
        else throw ConfigError({"tau: unknown name '" + v + "'"});
        return s;
    }
    if (j.is_object() && j.contains("selfadjoint_B")) {
        s.kind = TauSpec::Kind::selfadjoint;
        s.B = parse_matrix(j["selfadjoint_B"], "tau.selfadjoint_B");
        if (!hermitian(s.B)) throw ConfigError({"tau.selfadjoint_B: not Hermitian"});
        return s;
    }
    if (j.is_object() && j.contains("C0") && j.contains("C1")) {
        s.kind = TauSpec::Kind::pair;
        s.C0 = parse_matrix(j["C0"], "tau.C0");
        s.C1 = parse_matrix(j["C1"], "tau.C1");
        if (j.contains("D0") != j.contains("D1")) throw ConfigError({"tau: D0 and D1 go together"});
        if (j.contains("D0")) {
            s.D0 = parse_matrix(j["D0"], "tau.D0");
            s.D1 = parse_matrix(j["D1"], "tau.D1");
        }
        return s;
    }
    throw ConfigError({"tau: expected a name, {selfadjoint_B} or {C0, C1}"});
}

BoundaryParameterCollection resolve_tau(const TauSpec& s, const DecomposingTriplet& T) {
    try {
        switch (s.kind) {
            case TauSpec::Kind::automatic:
                if (T.tau_dim0() + T.tau_dim1() == 0) return empty_parameter(T);
                return dirichlet_parameter(T);
            case TauSpec::Kind::dirichlet:
                if (T.tau_dim0() + T.tau_dim1() == 0) return empty_parameter(T);
                return dirichlet_parameter(T);
            case TauSpec::Kind::neumann: return neumann_parameter(T);
            case TauSpec::Kind::selfadjoint: return selfadjoint_parameter(s.B, T);
            case TauSpec::Kind::pair: {
                if (!s.D0) return parameter_from_pair(OperatorPair::constant(s.C0, s.C1), T);
                auto coll = parameter_from_pair(OperatorPair::constant(s.C0, s.C1, HalfPlane::upper), T);
                coll.tau_minus = OperatorPair::constant(*s.D0, *s.D1, HalfPlane::lower);
                return coll;
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError({std::string("tau: ") + e.what()});
    }
    throw ConfigError({"tau: unsupported"});
}

std::vector<cd> grid(const json& j) {
    std::vector<cd> out;
    if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_entry(j[k], "lambda_grid[" + std::to_string(k) + "]"));
    } else if (j.is_object() && j.contains("rectangle")) {
        const json& r = j["rectangle"];
        const json& st = j.value("steps", json::array({5, 4}));
        const double r0 = number(r.at("re").at(0), "lambda_grid.rectangle.re[0]");
        const double r1 = number(r.at("re").at(1), "lambda_grid.rectangle.re[1]");
        const double i0 = number(r.at("im").at(0), "lambda_grid.rectangle.im[0]");
        const double i1 = number(r.at("im").at(1), "lambda_grid.rectangle.im[1]");
        const int nr = st.at(0).get<int>(), ni = st.at(1).get<int>();
        if (nr < 1 || ni < 1) throw ConfigError({"lambda_grid.steps: need positive counts"});
        for (int b = 0; b < ni; ++b)
            for (int a = 0; a < nr; ++a)
                out.emplace_back(nr == 1 ? r0 : r0 + (r1 - r0) * a / (nr - 1), ni == 1 ? i0 : i0 + (i1 - i0) * b / (ni - 1));
    } else {
        throw ConfigError({"lambda_grid: expected a list or {rectangle, steps}"});
    }
    Errors err;
    for (std::size_t k = 0; k < out.size(); ++k)
        if (out[k].imag() == 0.0) err.add("lambda_grid[" + std::to_string(k) + "]", "must be off the real axis");
    err.throw_if_any();
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

MethodChoice parse_method(const std::string& s) {
    if (s == "krein") return MethodChoice::krein;
    if (s == "direct") return MethodChoice::direct;
    if (s == "truncation") return MethodChoice::truncation;
    if (s == "all") return MethodChoice::all;
    throw ConfigError({"method: unknown '" + s + "'"});
}

std::vector<Method> expand(MethodChoice m) {
    switch (m) {
        case MethodChoice::krein: return {Method::krein};
        case MethodChoice::direct: return {Method::direct};
        case MethodChoice::truncation: return {Method::truncation};
        case MethodChoice::all: return {Method::krein, Method::direct, Method::truncation};
    }
    return {};
}

namespace {

double strict_real(const std::string& s, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw std::invalid_argument("cannot parse complex '" + text + "'");
    return v;
}

}  // namespace

cd parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("cannot parse complex '" + text + "'");
    if (s.back() != 'i' && s.back() != 'j') return {strict_real(s, text), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not an exponent sign
    std::size_t pos = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            pos = k;
            break;
        }
    const std::string re = pos == std::string::npos ? "" : body.substr(0, pos);
    const std::string im = pos == std::string::npos ? body : body.substr(pos);
    const double imv = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : strict_real(im, text);
    return {re.empty() ? 0.0 : strict_real(re, text), imv};
}

Mat parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError({path + ": expected a row-major array of rows"});
    const std::size_t rows = j.size();
    if (!j[0].is_array()) throw ConfigError({path + ": expected a row-major array of rows"});
    const std::size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ConfigError({path + "[" + std::to_string(r) + "]: ragged row"});
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_entry(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

ProblemConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError({"$: expected a JSON object"});
    ProblemConfig cfg;
    Errors err;
    try {
        if (doc.contains("builtin")) {
            cfg.label = doc["builtin"].get<std::string>();
            if (cfg.label == "odd_iy1") cfg.odd = builtins::first_order_expression();
            else if (cfg.label == "odd_minus_iy3") cfg.odd = builtins::third_order_expression();
            try {
                cfg.system = builtins::by_name(cfg.label);
            } catch (const std::invalid_argument& e) {
                throw ConfigError({std::string("builtin: ") + e.what()});
            }
        } else if (doc.contains("odd_order")) {
            cfg.label = "odd_order";
            cfg.odd = odd_expression(doc["odd_order"]);
            try {
                cfg.system = reduce_to_system(*cfg.odd).system;
            } catch (const std::invalid_argument& e) {
                throw ConfigError({std::string("odd_order: ") + e.what()});
            }
        } else if (doc.contains("layout")) {
            cfg.label = doc.value("name", "custom");
            cfg.system = custom_system(doc, err);
        } else {
            throw ConfigError({"$: need one of builtin, odd_order or layout"});
        }
        if (doc.contains("method")) cfg.method = parse_method(doc["method"].get<std::string>());
        if (doc.contains("schedule")) {
            const json& s = doc["schedule"];
            for (std::size_t k = 0; k < s.size(); ++k) cfg.opts.schedule.push_back(number(s[k], "schedule[" + std::to_string(k) + "]"));
            for (std::size_t k = 1; k < cfg.opts.schedule.size(); ++k)
                if (!(cfg.opts.schedule[k] > cfg.opts.schedule[k - 1])) err.add("schedule", "must increase");
        }
        if (doc.contains("tolerances")) {
            const json& t = doc["tolerances"];
            if (!t.is_object()) throw ConfigError({"tolerances: expected an object"});
            for (auto it = t.begin(); it != t.end(); ++it) {
                std::ostringstream kv;
                kv << it.key() << "=" << std::setprecision(17) << number(it.value(), "tolerances." + it.key());
                try {
                    apply_override(cfg, kv.str());
                } catch (const ConfigError&) {
                    err.add("tolerances." + it.key(), "unknown key");
                }
            }
        }
        cfg.grid = doc.contains("lambda_grid") ? grid(doc["lambda_grid"]) : std::vector<cd>{};
        cfg.tau_spec = tau_spec(doc.contains("tau") ? doc["tau"] : json());
        err.throw_if_any();
        const DecomposingTriplet T = build_triplet(cfg.system);
        cfg.tau = resolve_tau(cfg.tau_spec, T);
        const PairReport pr = validate_collection(cfg.tau, {cd(0, 1), cd(0, -1), cd(1, 2), cd(-1, -2)});
        if (!pr.ok)
            for (const auto& f : pr.failures) err.add("tau", f);
    } catch (const json::exception& e) {
        err.add("$", e.what());
    } catch (const std::invalid_argument& e) {
        err.add("$", e.what());
    }
    err.throw_if_any();
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError({file.string() + ": cannot open"});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({file.string() + ": " + e.what()});
    }
    return parse_config(doc);
}

void apply_override(ProblemConfig& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError({"--tol-override: expected KEY=VAL, got '" + kv + "'"});
    const std::string key = kv.substr(0, eq);
    double v = 0.0;
    try {
        v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
        throw ConfigError({"--tol-override: bad value in '" + kv + "'"});
    }
    if (key == "symmetry") cfg.tol.symmetry = v;
    else if (key == "inequality") cfg.tol.inequality = v;
    else if (key == "equality") cfg.tol.equality = v;
    else if (key == "identity") cfg.tol.identity = v;
    else if (key == "triangular") cfg.tol.triangular = v;
    else if (key == "quad_tol") cfg.tol.quad_tol = v;
    else if (key == "agreement") cfg.agreement_tol = v;
    else if (key == "rel_tol") cfg.opts.prop.rel_tol = v;
    else if (key == "abs_tol") cfg.opts.prop.abs_tol = v;
    else if (key == "cond_limit") cfg.opts.cond_limit = v;
    else if (key == "basis_tol") cfg.opts.basis_tol = v;
    else throw ConfigError({"tolerances." + key + ": unknown key"});
}

}  // namespace weylforge::cli
