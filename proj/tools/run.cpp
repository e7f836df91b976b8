#include "run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace weylforge::cli {

using nlohmann::json;

bool RunArtifacts::any_failed_point() const {
    for (const auto& e : entries)
        if (!e.converged) return true;
    return false;
}

bool RunArtifacts::all_properties_passed() const {
    for (const auto& [m, r] : reports)
        if (!r.all_passed()) return false;
    return !agreement_checked || agreement <= agreement_tol;
}

int RunArtifacts::exit_code(bool strict) const {
    if (any_failed_point()) return exit_nonconvergence;
    if (strict && !all_properties_passed()) return exit_violation;
    return exit_ok;
}

namespace {

struct Job {
    cd lambda;
    Method method;
};

GridEntry evaluate(const ProblemConfig& cfg, const DecomposingTriplet& T, const Job& job, MFunctionResult* full) {
    GridEntry e;
    e.lambda = job.lambda;
    e.method = job.method;
    try {
        MFunctionResult r;
        switch (job.method) {
            case Method::krein: r = m_tau_krein(cfg.system, T, cfg.tau, job.lambda, cfg.opts); break;
            case Method::direct: r = m_tau_direct(cfg.system, T, cfg.tau, job.lambda, cfg.opts); break;
            case Method::truncation: {
                const auto sched = cfg.opts.schedule.empty() ? default_beta_schedule(cfg.system.a) : cfg.opts.schedule;
                r = m_limit_singular(cfg.system, T, cfg.tau, job.lambda, sched, cfg.opts);
                break;
            }
        }
        e.m = r.m;
        e.converged = r.diagnostics.converged && r.m.allFinite();
        e.diagnostics = r.diagnostics;
        if (full) *full = std::move(r);
    } catch (const std::exception& ex) {
        e.error = ex.what();
        e.converged = false;
    }
    return e;
}

}  // namespace

RunArtifacts run_grid(const ProblemConfig& cfg, unsigned threads) {
    RunArtifacts art;
    art.label = cfg.label;
    art.agreement_tol = cfg.agreement_tol;
    const DecomposingTriplet T = build_triplet(cfg.system);
    art.case_tag = to_string(T.cls.tag);
    art.n_plus = T.alpha == 1 ? T.dim_H0 : T.dim_H1;
    art.n_minus = T.alpha == 1 ? T.dim_H1 : T.dim_H0;
    const std::vector<Method> methods = expand(cfg.method);
    if (cfg.grid.empty()) return art;

    // grid points first, then conjugates not already present
    std::vector<cd> points = cfg.grid;
    for (cd l : cfg.grid) {
        const cd c = std::conj(l);
        if (std::find(points.begin(), points.end(), c) == points.end()) points.push_back(c);
    }
    std::vector<Job> jobs;
    for (cd l : points)
        for (Method m : methods) jobs.push_back({l, m});
    std::vector<GridEntry> out(jobs.size());
    std::vector<MFunctionResult> full(jobs.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) out[k] = evaluate(cfg, T, jobs[k], &full[k]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    const std::size_t shown = cfg.grid.size() * methods.size();
    art.entries.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(shown));
    for (Method m : methods) {
        std::vector<MFunctionResult> rs;
        for (std::size_t k = 0; k < jobs.size(); ++k)
            if (jobs[k].method == m && out[k].converged) rs.push_back(full[k]);
        art.reports[m] = check_m_properties(rs, cfg.system, cfg.tol);
    }
    if (methods.size() > 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            if (jobs[k].method != Method::krein || !out[k].converged) continue;
            for (std::size_t j = 0; j < jobs.size(); ++j)
                if (jobs[j].method == Method::direct && jobs[j].lambda == jobs[k].lambda && out[j].converged) {
                    art.agreement_checked = true;
                    art.agreement = std::max(art.agreement, norm2(out[k].m - out[j].m));
                }
        }
    }
    return art;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json property_json(const PropertyCheck& c) {
    return json{{"applicable", c.applicable}, {"passed", c.passed}, {"residual", c.residual},
                {"tolerance", c.tolerance},   {"samples", c.samples}, {"detail", c.detail}};
}

}  // namespace

std::string csv_text(const RunArtifacts& art) {
    std::ostringstream os;
    os << "lambda_re,lambda_im,method,block_row,block_col,m_re,m_im,converged\n";
    for (const auto& e : art.entries) {
        if (!e.converged) {
            os << num(e.lambda.real()) << ',' << num(e.lambda.imag()) << ',' << to_string(e.method)
               << ",0,0,nan,nan,false\n";
            continue;
        }
        for (Eigen::Index r = 0; r < e.m.rows(); ++r)
            for (Eigen::Index c = 0; c < e.m.cols(); ++c)
                os << num(e.lambda.real()) << ',' << num(e.lambda.imag()) << ',' << to_string(e.method) << ',' << r
                   << ',' << c << ',' << num(e.m(r, c).real()) << ',' << num(e.m(r, c).imag()) << ",true\n";
    }
    return os.str();
}

std::string report_text(const RunArtifacts& art) {
    json j;
    j["system"] = art.label;
    j["case"] = art.case_tag;
    j["deficiency"] = {art.n_plus, art.n_minus};
    json methods = json::object();
    for (const auto& [m, r] : art.reports) {
        json checks = json::object();
        for (const auto& c : r.checks) checks[c.name] = property_json(c);
        methods[to_string(m)] = checks;
    }
    j["properties"] = methods;
    if (art.agreement_checked) j["krein_direct_agreement"] = {{"residual", art.agreement}, {"tolerance", art.agreement_tol}};
    json failures = json::array();
    for (const auto& e : art.entries)
        if (!e.converged)
            failures.push_back({{"lambda", {e.lambda.real(), e.lambda.imag()}}, {"method", to_string(e.method)}, {"error", e.error}});
    j["failures"] = failures;
    j["all_passed"] = art.all_properties_passed() && !art.any_failed_point();
    return j.dump(2) + "\n";
}

void emit_report(const RunArtifacts& art, const std::filesystem::path& dir, Format fmt) {
    std::filesystem::create_directories(dir);
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << text;
    };
    if (fmt == Format::csv) {
        write(dir / "m_values.csv", art.entries.empty() ? std::string() : csv_text(art));
    } else {
        json rows = json::array();
        for (const auto& e : art.entries) {
            json m = json::array();
            for (Eigen::Index r = 0; r < e.m.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < e.m.cols(); ++c) row.push_back({e.m(r, c).real(), e.m(r, c).imag()});
                m.push_back(row);
            }
            rows.push_back({{"lambda", {e.lambda.real(), e.lambda.imag()}}, {"method", to_string(e.method)},
                            {"m", m}, {"converged", e.converged}});
        }
        write(dir / "m_values.json", art.entries.empty() ? std::string() : rows.dump(2) + "\n");
    }
    write(dir / "report.json", art.entries.empty() ? std::string() : report_text(art));
}

}  // namespace weylforge::cli
