// lacuna: evaluate lacunary Fourier series, extract single coefficients by
// band-limited convolution, check (non-)differentiability hypotheses, and
// emit figure data as CSV.  Output is deterministic for identical flags;
// NDF_THREADS caps internal parallelism.

#include <cinttypes>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lacuna/conditions.hpp"
#include "lacuna/extraction.hpp"
#include "lacuna/kernels.hpp"
#include "lacuna/probe.hpp"
#include "lacuna/series.hpp"

using json = nlohmann::ordered_json;
using namespace lacuna;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw OutOfRange("cannot open output file " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    fs::rename(tmp, target);
}

std::string to_csv(const std::vector<SamplePoint>& rows) {
    std::string out = "t,re,im\n";
    for (const auto& r : rows) {
        out += fmt17(r.t);
        out += ',';
        out += fmt17(r.re);
        out += ',';
        out += fmt17(r.im);
        out += '\n';
    }
    return out;
}

json complex_json(const std::complex<double>& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

// ---------------------------------------------------------------------------
// family selection

struct FamilyFlags {
    std::string family;
    double theta = 1.0;
    double a = 2.0;
    double b = 3.0;
    double p = 2.0;
    double q = 3.0;
    int n = 3;
    std::string variant; // empty = family default
    bool allow_out_of_range = false;
};

void add_family_flags(CLI::App* cmd, FamilyFlags& f) {
    cmd->add_option("--family", f.family, "series family (see `lacuna list`)")
        ->required();
    cmd->add_option("--theta", f.theta, "f_theta exponent, 0 < theta <= 1");
    cmd->add_option("--a", f.a, "amplitude base / iterated_log exponent");
    cmd->add_option("--b", f.b, "frequency base (weierstrass)");
    cmd->add_option("--p", f.p, "amplitude exponent (power, gap_example)");
    cmd->add_option("--q", f.q, "frequency exponent (power)");
    cmd->add_option("--n", f.n, "iterated_log depth (2..4)");
    cmd->add_option("--variant", f.variant, "complex | re | im (default per family)")
        ->check(CLI::IsMember({"complex", "re", "im"}));
    cmd->add_flag("--allow-out-of-range", f.allow_out_of_range,
                  "permit parameters outside the classified ranges");
}

SeriesSpec build_spec(const FamilyFlags& f) {
    SeriesSpec spec = [&] {
        if (f.family == "f_theta") return SeriesSpec::f_theta(f.theta, f.allow_out_of_range);
        if (f.family == "weierstrass_cos")
            return SeriesSpec::weierstrass_cos(f.a, f.b, f.allow_out_of_range);
        if (f.family == "weierstrass_sin")
            return SeriesSpec::weierstrass_sin(f.a, f.b, f.allow_out_of_range);
        if (f.family == "darboux") return SeriesSpec::darboux();
        if (f.family == "gap_example") return SeriesSpec::gap_example(f.a, f.p);
        if (f.family == "power") return SeriesSpec::power(f.p, f.q);
        if (f.family == "riemann") return SeriesSpec::riemann();
        if (f.family == "iterated_log") return SeriesSpec::iterated_log(f.n, f.a);
        throw OutOfRange("unknown family '" + f.family + "' (see `lacuna list`)");
    }();
    if (f.variant == "complex") spec = spec.with_variant(Variant::complex_sum);
    if (f.variant == "re") spec = spec.with_variant(Variant::real_part);
    if (f.variant == "im") spec = spec.with_variant(Variant::imag_part);
    return spec;
}

// ---------------------------------------------------------------------------
// list

struct FamilyInfo {
    const char* name;
    const char* parameters;
    const char* constraints;
    const char* formula;
    const char* start;
};

const FamilyInfo kCatalog[] = {
    {"f_theta", "theta", "0 < theta <= 1",
     "f(t) = sum_{j>=0} 2^(-j theta) exp(i 2^j t)", "j0 = 0"},
    {"weierstrass_cos", "a, b", "requires b >= a > 1",
     "W(t) = sum_{j>=0} a^(-j) cos(b^j t)", "j0 = 0"},
    {"weierstrass_sin", "a, b", "requires b >= a > 1",
     "S(t) = sum_{j>=0} a^(-j) sin(b^j t)", "j0 = 0"},
    {"darboux", "", "no parameters",
     "f(t) = sum_{j>=0} sin((j+1)! t) / j!", "j0 = 0"},
    {"gap_example", "a, p", "a > 1 and 1 + a^-p < a^2",
     "a_j = a^-j, b_2m = a^2m, b_2m+1 = (1 + a^-p) a^2m", "j0 = 0"},
    {"power", "p, q", "p > 1, q > 0",
     "f(t) = sum_{j>=1} exp(i t j^q) / j^p", "j0 = 1"},
    {"riemann", "", "no parameters",
     "R(t) = sum_{j>=1} sin(pi j^2 t) / j^2", "j0 = 1"},
    {"iterated_log", "n, a", "2 <= n <= 4, a > 1",
     "b_j = j^2 log j ... Log_{n-1} j (Log_n j)^a, a_j = 1/(j log j ... (Log_n j)^a)",
     "j0 = floor(E_{n-1}) + 1: n=2 -> 3, n=3 -> 16, n=4 -> 3814280"},
};

int cmd_list(const std::string& format, const std::string& out_path) {
    if (format == "json") {
        json j = json::array();
        for (const auto& f : kCatalog)
            j.push_back(json{{"family", f.name},
                             {"parameters", f.parameters},
                             {"constraints", f.constraints},
                             {"formula", f.formula},
                             {"start_index", f.start}});
        write_output(out_path, j.dump(2) + "\n");
    } else {
        std::string out;
        for (const auto& f : kCatalog) {
            out += f.name;
            if (*f.parameters) out += std::string("(") + f.parameters + ")";
            out += std::string(", ") + f.constraints;
            out += std::string("\n    ") + f.formula;
            out += std::string("\n    ") + f.start + "\n";
        }
        write_output(out_path, out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// check / extract serialization

json report_json(const ConditionReport& r) {
    json j;
    j["window"] = json::array({r.window_lo, r.window_hi});
    j["ratio_min"] = r.ratio_min;
    j["ratio_trend"] = r.ratio_trend;
    j["ab_sup"] = r.ab_sup;
    j["ab_tailmax"] = r.ab_tailmax;
    j["gap_sup"] = r.gap_sup;
    j["gap_tailmax"] = r.gap_tailmax;
    j["convexity_ok"] = r.convexity_ok;
    j["c1_bound"] = r.c1_bound ? json(*r.c1_bound) : json(nullptr);
    j["holder_alpha_freq"] = r.holder_alpha_freq;
    j["holder_alpha_gap"] = r.holder_alpha_gap;
    j["verdict"] = verdict_name(r.verdict);
    j["verdict_basis"] = verdict_basis_name(r.verdict_basis);
    return j;
}

json extraction_json(const std::vector<ExtractionReport>& reports,
                     const std::string& method) {
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["k"] = r.k;
        j["t0"] = r.t0;
        j["method"] = method;
        j["expected"] = complex_json(r.expected);
        j["analytic"] = complex_json(r.analytic);
        j["quadrature"] = r.quadrature ? complex_json(*r.quadrature) : json(nullptr);
        j["residual_analytic"] = r.residual_analytic;
        j["residual_quadrature"] =
            r.residual_quadrature ? json(*r.residual_quadrature) : json(nullptr);
        j["tail_eps"] = r.tail_eps;
        if (r.quad_params) {
            j["quad_params"] = json{{"tau_nodes", r.quad_params->tau_nodes},
                                    {"radius", r.quad_params->radius},
                                    {"step", r.quad_params->step},
                                    {"f_eval_tail", r.quad_params->f_eval_tail},
                                    {"est_error", r.quad_params->est_error}};
        } else {
            j["quad_params"] = json(nullptr);
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

bool parse_k_range(const std::string& s, std::int64_t& k0, std::int64_t& k1) {
    auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            k0 = k1 = std::stoll(s);
        } else {
            k0 = std::stoll(s.substr(0, dots));
            k1 = std::stoll(s.substr(dots + 2));
        }
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lacunary Fourier series laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // --out may follow the subcommand
    // several probes take an --h step size, so keep help on --help alone
    app.set_help_flag("--help", "print help");

    std::string out_path;
    app.add_option("--out", out_path, "output file (atomic write); default stdout");

    // ---- list
    auto* list_cmd = app.add_subcommand("list", "print the family catalog");
    std::string list_format = "text";
    list_cmd->add_option("--format", list_format)->check(CLI::IsMember({"text", "json"}));

    // ---- sample
    auto* sample_cmd = app.add_subcommand("sample", "evaluate a partial sum on a t-grid");
    FamilyFlags sample_f;
    add_family_flags(sample_cmd, sample_f);
    double s_t0 = 0.0, s_t1 = 1.0, s_eps = 1e-8;
    int s_points = 100;
    std::int64_t s_terms = 0;
    std::string s_format = "csv";
    sample_cmd->add_option("--t0", s_t0, "grid start")->required();
    sample_cmd->add_option("--t1", s_t1, "grid end")->required();
    sample_cmd->add_option("--points", s_points, "grid size")->required();
    sample_cmd->add_option("--eps", s_eps, "truncation tail bound (default 1e-8)");
    sample_cmd->add_option("--terms", s_terms, "fixed term count override");
    sample_cmd->add_option("--format", s_format)->check(CLI::IsMember({"csv", "json"}));

    // ---- figure
    auto* figure_cmd = app.add_subcommand("figure", "figure-data presets (1000 terms)");
    std::string figure_name;
    figure_cmd->add_option("name", figure_name, "f2 | f3 | f4 | f4dev")
        ->required()
        ->check(CLI::IsMember({"f2", "f3", "f4", "f4dev"}));

    // ---- check
    auto* check_cmd = app.add_subcommand("check", "hypothesis scan and verdict");
    FamilyFlags check_f;
    add_family_flags(check_cmd, check_f);
    std::int64_t c_j0 = -1, c_j1 = -1;
    check_cmd->add_option("--j0", c_j0, "window start (default start_index)");
    check_cmd->add_option("--j1", c_j1, "window end (default start + 512)");

    // ---- extract
    auto* extract_cmd = app.add_subcommand("extract", "single-coefficient extraction sweep");
    FamilyFlags extract_f;
    add_family_flags(extract_cmd, extract_f);
    std::string e_krange;
    double e_t0 = 0.0, e_eps = 1e-12;
    std::string e_method = "auto";
    bool e_no_quadrature = false;
    extract_cmd->add_option("--k", e_krange, "index or range, e.g. 6 or 3..12")->required();
    extract_cmd->add_option("--t0", e_t0, "extraction point");
    extract_cmd->add_option("--eps", e_eps, "tail bound (default 1e-12)");
    extract_cmd->add_option("--method", e_method)
        ->check(CLI::IsMember({"auto", "frequency", "gap"}));
    extract_cmd->add_flag("--no-quadrature", e_no_quadrature,
                          "skip the real-space quadrature route");

    // ---- probe
    auto* probe_cmd = app.add_subcommand("probe", "differentiability probes");
    probe_cmd->require_subcommand(1);

    auto* pq_cmd = probe_cmd->add_subcommand("quotients", "difference-quotient trace");
    FamilyFlags pq_f;
    add_family_flags(pq_cmd, pq_f);
    double pq_t0 = 0.0, pq_eps = 1e-12;
    std::string pq_rule = "inverse-b";
    std::int64_t pq_k0 = -1, pq_k1 = -1;
    pq_cmd->add_option("--t0", pq_t0, "base point");
    pq_cmd->add_option("--rule", pq_rule)
        ->check(CLI::IsMember({"inverse-b", "inverse-delta-b", "dyadic"}));
    pq_cmd->add_option("--k0", pq_k0, "first index / dyadic exponent");
    pq_cmd->add_option("--k1", pq_k1, "last index / dyadic exponent");
    pq_cmd->add_option("--eps", pq_eps, "evaluation tail bound");

    auto* po_cmd = probe_cmd->add_subcommand("oscillation", "empirical modulus of continuity");
    FamilyFlags po_f;
    add_family_flags(po_cmd, po_f);
    double po_h = 0.0, po_t0 = 0.0, po_t1 = 6.283185307179586, po_eps = 1e-6;
    int po_points = 2048;
    po_cmd->add_option("--h", po_h, "shift")->required();
    po_cmd->add_option("--t0", po_t0);
    po_cmd->add_option("--t1", po_t1);
    po_cmd->add_option("--points", po_points);
    po_cmd->add_option("--eps", po_eps);

    auto* ph_cmd = probe_cmd->add_subcommand("holder", "log-log oscillation fit");
    FamilyFlags ph_f;
    add_family_flags(ph_cmd, ph_f);
    double ph_hmin = std::ldexp(1.0, -16), ph_hmax = std::ldexp(1.0, -6);
    int ph_levels = 11, ph_points = 512;
    double ph_t0 = 0.0, ph_t1 = 6.283185307179586, ph_eps = 2e-4;
    ph_cmd->add_option("--h-min", ph_hmin);
    ph_cmd->add_option("--h-max", ph_hmax);
    ph_cmd->add_option("--levels", ph_levels);
    ph_cmd->add_option("--points", ph_points);
    ph_cmd->add_option("--t0", ph_t0);
    ph_cmd->add_option("--t1", ph_t1);
    ph_cmd->add_option("--eps", ph_eps);

    auto* pr_cmd = probe_cmd->add_subcommand("riemann-derivative",
                                             "quotient of the normalized quadratic sine series at odd r/s");
    std::int64_t pr_r = 1, pr_s = 1;
    double pr_h = 1e-4;
    double pr_terms = 1e7;
    pr_cmd->add_option("--r", pr_r, "odd numerator")->required();
    pr_cmd->add_option("--s", pr_s, "odd denominator")->required();
    pr_cmd->add_option("--h", pr_h, "quotient step");
    pr_cmd->add_option("--terms", pr_terms, "truncation N (accepts 1e7 style)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*list_cmd) return cmd_list(list_format, out_path);

        if (*sample_cmd) {
            SeriesSpec spec = build_spec(sample_f);
            std::optional<std::int64_t> terms;
            if (sample_cmd->count("--terms")) terms = s_terms;
            auto rows = sample(spec, s_t0, s_t1, s_points, s_eps, terms);
            if (s_format == "json") {
                json j = json::array();
                for (const auto& r : rows)
                    j.push_back(json{{"t", r.t}, {"re", r.re}, {"im", r.im}});
                write_output(out_path, j.dump(2) + "\n");
            } else {
                write_output(out_path, to_csv(rows));
            }
            return 0;
        }

        if (*figure_cmd) {
            std::vector<SamplePoint> rows;
            if (figure_name == "f2")
                rows = sample(SeriesSpec::iterated_log(2, 2.0), 0.0, 150.0, 1000, 1e-8,
                              std::int64_t{1000});
            else if (figure_name == "f3")
                rows = sample(SeriesSpec::iterated_log(3, 2.0), 0.0, 150.0, 1000, 1e-8,
                              std::int64_t{1000});
            else if (figure_name == "f4")
                rows = sample(SeriesSpec::iterated_log(4, 2.0), 0.0, 100.0, 1000, 1e-8,
                              std::int64_t{1000});
            else
                rows = deviation_from_first_term(SeriesSpec::iterated_log(4, 2.0),
                                                 0.0, 100.0, 1000, 1000);
            write_output(out_path, to_csv(rows));
            return 0;
        }

        if (*check_cmd) {
            SeriesSpec spec = build_spec(check_f);
            std::int64_t j0 = c_j0 >= 0 ? c_j0 : spec.start_index();
            std::int64_t j1 = c_j1 >= 0 ? c_j1 : spec.start_index() + 512;
            ConditionReport r = hypothesis_scan(spec, j0, j1);
            write_output(out_path, report_json(r).dump(2) + "\n");
            return 0; // the verdict is data, not a failure
        }

        if (*extract_cmd) {
            SeriesSpec spec = build_spec(extract_f);
            std::int64_t k0 = 0, k1 = 0;
            if (!parse_k_range(e_krange, k0, k1))
                throw OutOfRange("cannot parse --k '" + e_krange + "' (want A or A..B)");

            std::string method = e_method;
            if (method == "auto") {
                try {
                    default_lambda(spec, e_eps);
                    method = "frequency";
                } catch (const LambdaTooWide&) {
                    method = "gap";
                }
            }
            std::vector<ExtractionReport> reports;
            if (method == "frequency") {
                double lambda = default_lambda(spec, e_eps);
                if (e_no_quadrature) {
                    for (std::int64_t k = k0; k <= k1; ++k) {
                        ExtractionReport r;
                        r.k = k;
                        r.t0 = e_t0;
                        r.tail_eps = e_eps;
                        r.expected = expected_coefficient(spec, k, e_t0);
                        r.analytic = extract_analytic(spec, lambda, k, e_t0, e_eps);
                        r.residual_analytic = std::abs(r.analytic - r.expected);
                        reports.push_back(r);
                    }
                    write_output(out_path, extraction_json(reports, method).dump(2) + "\n");
                    return 0;
                }
                BumpKernel kernel = build_kernel(lambda);
                // quadrature degrades per-k: budget failures leave the slot null
                for (std::int64_t k = k0; k <= k1; ++k) {
                    auto one = extraction_sweep(spec, kernel, k, k, e_t0, e_eps, false);
                    try {
                        // the real-space route is certified to the cross-method
                        // tolerance, not to the (possibly tighter) tail eps
                        one[0].quadrature =
                            extract_quadrature(spec, kernel, k, e_t0, std::max(e_eps, 1e-6));
                        one[0].residual_quadrature =
                            std::abs(*one[0].quadrature - one[0].expected);
                        QuadParams qp;
                        qp.tau_nodes = kernel.quadrature_nodes;
                        qp.radius = kernel.truncation_radius;
                        qp.step = kernel.grid_step;
                        qp.f_eval_tail = std::min(e_eps * 0.1, 1e-9);
                        qp.est_error = std::abs(*one[0].quadrature - one[0].analytic);
                        one[0].quad_params = qp;
                    } catch (const QuadratureBudgetExceeded&) {
                    }
                    reports.push_back(one[0]);
                }
            } else {
                GapKernel kernel = build_gap_kernel();
                reports = extraction_sweep(spec, kernel, k0, k1, e_t0, e_eps);
            }
            write_output(out_path, extraction_json(reports, method).dump(2) + "\n");
            return 0;
        }

        if (*pq_cmd) {
            SeriesSpec spec = build_spec(pq_f);
            ScaleRule rule = pq_rule == "inverse-b" ? ScaleRule::inverse_b_k
                             : pq_rule == "inverse-delta-b" ? ScaleRule::inverse_delta_b_k
                                                            : ScaleRule::dyadic;
            std::int64_t k0 = pq_k0, k1 = pq_k1;
            if (k0 < 0) k0 = rule == ScaleRule::dyadic ? 4 : spec.start_index() + 2;
            if (k1 < 0) k1 = rule == ScaleRule::dyadic ? 20 : k0 + 12;
            QuotientTrace tr = difference_quotients(spec, pq_t0, rule, k0, k1, pq_eps);
            json j;
            j["t0"] = tr.t0;
            j["rule"] = pq_rule;
            j["scales"] = tr.scales;
            json qs = json::array();
            for (const auto& q : tr.quotients) qs.push_back(complex_json(q));
            j["quotients"] = qs;
            j["band_values"] = tr.band_values;
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }

        if (*po_cmd) {
            SeriesSpec spec = build_spec(po_f);
            double v = oscillation(spec, po_h, po_t0, po_t1, po_points, po_eps);
            json j;
            j["h"] = po_h;
            j["value"] = v;
            j["t0"] = po_t0;
            j["t1"] = po_t1;
            j["points"] = po_points;
            j["eps"] = po_eps;
            j["note"] = "grid sup; lower bound on the true modulus of continuity";
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }

        if (*ph_cmd) {
            SeriesSpec spec = build_spec(ph_f);
            HolderFit fit = holder_estimate(spec, ph_hmin, ph_hmax, ph_levels,
                                            ph_t0, ph_t1, ph_points, ph_eps);
            json j;
            j["alpha_hat"] = fit.alpha_hat;
            j["intercept"] = fit.intercept;
            j["residual"] = fit.residual;
            j["h_min"] = fit.h_min;
            j["h_max"] = fit.h_max;
            j["grid_points"] = fit.grid_points;
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }

        if (*pr_cmd) {
            double q = riemann_derivative_probe(pr_r, pr_s, pr_h,
                                                static_cast<std::int64_t>(pr_terms));
            json j;
            j["r"] = pr_r;
            j["s"] = pr_s;
            j["h"] = pr_h;
            j["terms"] = static_cast<std::int64_t>(pr_terms);
            j["quotient"] = q;
            write_output(out_path, j.dump(2) + "\n");
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == Error::Kind::precondition ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
