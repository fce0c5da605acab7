#include "delreg/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "delreg/advisor.hpp"
#include "delreg/asymptotics.hpp"
#include "delreg/csv.hpp"
#include "delreg/errors.hpp"
#include "delreg/estimators.hpp"
#include "delreg/kurtosis.hpp"
#include "delreg/model.hpp"
#include "delreg/simulation.hpp"

namespace delreg::cli {

namespace {

using nlohmann::json;

std::string sci6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", x);
    return buf;
}

std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string paper_units(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x * 1e3);
    return buf;
}

struct Common {
    std::string input;
    std::string response;
    std::string method = "cc";
    std::string kappa = "0";
    std::string format = "csv";
    std::string output;
};

std::ostream& pick_stream(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty()) return fallback;
    file.open(path);
    if (!file) fail(Errc::invalid_argument, "cannot open output file '" + path + "'");
    return file;
}

double resolve_kappa(const std::string& spec, const Dataset& data) {
    if (spec == "estimate-marginal") return kappa_marginal(data).value;
    if (spec == "estimate-mardia") return kappa_mardia(data).value;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(spec.c_str(), &end);
    if (end == spec.c_str() || *end != '\0' || errno == ERANGE)
        fail(Errc::invalid_argument, "cannot parse --kappa value '" + spec + "'");
    return v;
}

Method parse_method(const std::string& m) {
    if (m == "cc") return Method::cc;
    if (m == "ac") return Method::ac;
    fail(Errc::invalid_argument, "method must be cc or ac here");
}

/// Model (response-last) estimated from the data by the requested method.
CovarianceModel model_from_data(const Dataset& rl, Method method, double kappa) {
    CovEstimate est = (method == Method::cc) ? cc_covariance(rl) : ac_covariance(rl);
    return partition_model(est.matrix, rl.response_index(), kappa);
}

int predictor_position(const std::vector<std::string>& header, int response_index,
                       const std::string& name) {
    int pos = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (static_cast<int>(j) == response_index) continue;
        if (header[j] == name) return pos;
        ++pos;
    }
    fail(Errc::invalid_argument, "no predictor named '" + name + "'");
}

json recommendation_json(const Recommendation& rec) {
    json j;
    j["verdict"] = verdict_name(rec.verdict);
    j["decisive_value"] = rec.decisive_value;
    j["var_cc"] = rec.var_cc;
    j["var_ac"] = rec.var_ac;
    j["conditions"] = rec.conditions;
    if (rec.interval_c) j["geometry"]["C"] = *rec.interval_c;
    if (rec.ellipse) {
        j["geometry"]["A"] = rec.ellipse->a;
        j["geometry"]["B"] = rec.ellipse->b;
    }
    if (rec.breakpoints) {
        json b;
        auto bound = [](double v) -> json {
            if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
            return v;
        };
        b["I_L"] = bound(rec.breakpoints->i_l);
        b["I_R"] = bound(rec.breakpoints->i_r);
        auto put = [&](const char* k, double v) {
            if (std::isfinite(v)) b[k] = v;
        };
        put("M0", rec.breakpoints->m0);
        put("M1", rec.breakpoints->m1);
        put("M2", rec.breakpoints->m2);
        put("M3", rec.breakpoints->m3);
        put("M4", rec.breakpoints->m4);
        put("con_1", rec.breakpoints->con1);
        j["breakpoints"] = b;
    }
    return j;
}

int cmd_fit(const Common& c, std::ostream& out) {
    NamedDataset nd = ingest_csv_file(c.input, c.response);
    std::vector<Method> methods;
    if (c.method == "both") {
        methods = {Method::cc, Method::ac};
    } else {
        methods = {parse_method(c.method)};
    }

    std::vector<std::string> pred_names;
    for (std::size_t j = 0; j < nd.header.size(); ++j)
        if (static_cast<int>(j) != nd.data.response_index()) pred_names.push_back(nd.header[j]);

    if (c.format == "json") {
        json j;
        for (Method m : methods) {
            FitResult r = fit(nd.data, m);
            json coef;
            for (std::size_t k = 0; k < pred_names.size(); ++k)
                coef[pred_names[k]] = r.beta_hat(static_cast<long>(k));
            j[method_name(m)] = {{"beta", coef},
                                 {"n_effective", r.n_effective},
                                 {"cov_positive_definite", r.cov_estimate.pd}};
        }
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "method";
    for (const auto& nm : pred_names) out << "," << nm;
    out << "\n";
    for (Method m : methods) {
        FitResult r = fit(nd.data, m);
        out << method_name(m);
        for (long k = 0; k < r.beta_hat.size(); ++k) out << "," << full(r.beta_hat(k));
        out << "\n";
    }
    return 0;
}

int cmd_variance(const Common& c, const std::string& target, std::ostream& out) {
    NamedDataset nd = ingest_csv_file(c.input, c.response);
    Dataset rl = nd.data.response_last();
    const double kappa = resolve_kappa(c.kappa, rl);
    const Method m = (c.method == "both") ? Method::cc : parse_method(c.method);
    CovarianceModel model = model_from_data(rl, m, kappa);
    ProportionSet props = observation_proportions(rl);
    const long n = rl.rows();

    if (!target.empty()) {
        const int pos = predictor_position(nd.header, nd.data.response_index(), target);
        const double vcc = v_single(model, props, n, Method::cc, pos);
        const double vac = v_single(model, props, n, Method::ac, pos);
        if (c.format == "json") {
            json j = {{"target", target},
                      {"n", n},
                      {"kappa", kappa},
                      {"v_cc", vcc},
                      {"v_ac", vac},
                      {"v_d", vcc - vac}};
            out << j.dump(2) << "\n";
        } else {
            out << "quantity,value\n";
            out << "v_cc," << sci6(vcc) << "\n";
            out << "v_ac," << sci6(vac) << "\n";
            out << "v_d," << sci6(vcc - vac) << "\n";
        }
        return 0;
    }

    AsymptoticReport rep = v_matrices(model, props, n);
    if (c.format == "json") {
        auto mat = [](const Eigen::MatrixXd& m2) {
            json rows = json::array();
            for (long i = 0; i < m2.rows(); ++i) {
                json row = json::array();
                for (long j = 0; j < m2.cols(); ++j) row.push_back(m2(i, j));
                rows.push_back(row);
            }
            return rows;
        };
        json j = {{"n", n},      {"kappa", kappa},       {"v_cc", mat(rep.v_cc)},
                  {"v_ac", mat(rep.v_ac)}, {"v_d", mat(rep.v_d)}};
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "quantity,row,col,value\n";
    auto dump = [&](const char* name, const Eigen::MatrixXd& m2) {
        for (long i = 0; i < m2.rows(); ++i)
            for (long j = 0; j < m2.cols(); ++j)
                out << name << "," << i << "," << j << "," << sci6(m2(i, j)) << "\n";
    };
    dump("v_cc", rep.v_cc);
    dump("v_ac", rep.v_ac);
    dump("v_d", rep.v_d);
    return 0;
}

int cmd_advise(const Common& c, const std::string& pattern, double q1, double q_rest,
               std::ostream& out) {
    NamedDataset nd = ingest_csv_file(c.input, c.response);
    Dataset rl = nd.data.response_last();
    const double kappa = resolve_kappa(c.kappa, rl);
    const Method m = (c.method == "both") ? Method::cc : parse_method(c.method);
    CovarianceModel model = model_from_data(rl, m, kappa);

    PatternSpec spec;
    if (pattern == "a") {
        spec = PatternSpec::pattern_a(q1, q_rest);
    } else if (pattern == "b") {
        spec = PatternSpec::pattern_b(q1, q_rest);
    } else if (pattern == "general") {
        spec = PatternSpec::general(observation_proportions(rl));
    } else {
        fail(Errc::invalid_argument, "pattern must be a, b or general");
    }
    Recommendation rec = advise(model, spec, rl.rows());
    json j = recommendation_json(rec);
    j["pattern"] = pattern;
    j["n"] = rl.rows();
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_simulate(int setting, long n, const std::string& pattern, double q1, double q_rest,
                 int inner, int outer, std::uint64_t seed, const Common& c, std::ostream& out) {
    PatternSpec masks;
    if (pattern == "a") {
        masks = PatternSpec::pattern_a(q1, q_rest);
    } else if (pattern == "b") {
        masks = PatternSpec::pattern_b(q1, q_rest);
    } else {
        masks = PatternSpec::general(ProportionSet::independent({q1, q_rest, 1.0}));
    }
    SimSetting s = SimSetting::make(setting, n, masks, inner, outer);
    MCResult r = run_mc(s, seed);
    if (c.format == "json") {
        json j = {{"setting", setting},
                  {"n", n},
                  {"seed", seed},
                  {"failed_fits", r.failed_fits},
                  {"kappa_hat", r.kappa_hat},
                  {"cc", {{"var", r.cc.var_hat}, {"sd_of_var", r.cc.sd_of_var}, {"mean_beta", r.cc.mean_beta}}},
                  {"ac", {{"var", r.ac.var_hat}, {"sd_of_var", r.ac.sd_of_var}, {"mean_beta", r.ac.mean_beta}}}};
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "method,var,sd_of_var,mean_beta\n";
    out << "CC," << sci6(r.cc.var_hat) << "," << sci6(r.cc.sd_of_var) << ","
        << full(r.cc.mean_beta) << "\n";
    out << "AC," << sci6(r.ac.var_hat) << "," << sci6(r.ac.sd_of_var) << ","
        << full(r.ac.mean_beta) << "\n";
    return 0;
}

int cmd_reproduce(const std::string& table, std::uint64_t seed, int inner, int outer,
                  bool paper_scale, const Common& c, std::ostream& out) {
    ReportTable t = reproduce_table(table_id_from_string(table), seed, inner, outer);
    auto is_variance_col = [&](const std::string& name) {
        return name.find("sim") != std::string::npos || name.find("theory") != std::string::npos ||
               name.find("_sd") != std::string::npos;
    };
    if (c.format == "json") {
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row;
            for (std::size_t j = 0; j < t.columns.size(); ++j) row[t.columns[j]] = r[j];
            rows.push_back(row);
        }
        out << json{{"table", table}, {"rows", rows}}.dump(2) << "\n";
        return 0;
    }
    for (std::size_t j = 0; j < t.columns.size(); ++j)
        out << t.columns[j] << (j + 1 < t.columns.size() ? "," : "\n");
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            const bool scale = paper_scale && is_variance_col(t.columns[j]);
            out << (scale ? paper_units(r[j]) : full(r[j]));
            out << (j + 1 < t.columns.size() ? "," : "\n");
        }
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"deletion-based regression with missing data: fit, variance, advice, simulation"};
    app.require_subcommand(1);

    Common c;
    std::string target, pattern = "general", table;
    double q1 = 0.9, q_rest = 0.9;
    int setting = 1, inner = 2000, outer = 20;
    long n = 1000;
    std::uint64_t seed = 0;
    bool paper_scale = false;

    auto add_common_io = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input) {
            cmd->add_option("--input", c.input, "input CSV file")->required();
            cmd->add_option("--response", c.response, "response column name")->required();
        }
        cmd->add_option("--format", c.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--output", c.output, "output file (default stdout)");
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "estimate coefficients by CC and/or AC");
    add_common_io(fit_cmd, true);
    fit_cmd->add_option("--method", c.method, "cc, ac or both")
        ->check(CLI::IsMember({"cc", "ac", "both"}));

    CLI::App* var_cmd = app.add_subcommand("variance", "asymptotic variances V_CC, V_AC, V_D");
    add_common_io(var_cmd, true);
    var_cmd->add_option("--method", c.method, "covariance estimate feeding the model")
        ->check(CLI::IsMember({"cc", "ac"}));
    var_cmd->add_option("--target", target, "single predictor column name");
    var_cmd->add_option("--kappa", c.kappa, "0, estimate-marginal, estimate-mardia or a number");

    CLI::App* adv_cmd = app.add_subcommand("advise", "recommend CC or AC for a missing pattern");
    add_common_io(adv_cmd, true);
    adv_cmd->add_option("--method", c.method, "covariance estimate feeding the model")
        ->check(CLI::IsMember({"cc", "ac"}));
    adv_cmd->add_option("--pattern", pattern, "a, b or general")
        ->check(CLI::IsMember({"a", "b", "general"}));
    adv_cmd->add_option("--q1", q1, "observed proportion of the first predictor");
    adv_cmd->add_option("--q-rest", q_rest, "observed proportion of the remaining predictors");
    adv_cmd->add_option("--kappa", c.kappa, "0, estimate-marginal, estimate-mardia or a number");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo variance of beta_V");
    add_common_io(sim_cmd, false);
    sim_cmd->add_option("--setting", setting, "data-generating setting 1..5")
        ->check(CLI::Range(1, 5));
    sim_cmd->add_option("--n", n, "rows per replicate");
    sim_cmd->add_option("--pattern", pattern, "a, b or general")
        ->check(CLI::IsMember({"a", "b", "general"}));
    sim_cmd->add_option("--q1", q1, "observed proportion of the first predictor");
    sim_cmd->add_option("--q-rest", q_rest, "observed proportion of the remaining predictors");
    sim_cmd->add_option("--inner", inner, "beta draws per variance estimate");
    sim_cmd->add_option("--outer", outer, "repeats for the sd of the variance");
    sim_cmd->add_option("--seed", seed, "RNG seed")->required();

    CLI::App* rep_cmd = app.add_subcommand("reproduce", "emit a study table as CSV");
    add_common_io(rep_cmd, false);
    rep_cmd->add_option("--table", table, "T4, S1, S2, S3 or FIG3")
        ->required()
        ->check(CLI::IsMember({"T4", "S1", "S2", "S3", "FIG3", "t4", "s1", "s2", "s3", "fig3"}));
    rep_cmd->add_option("--seed", seed, "RNG seed")->required();
    rep_cmd->add_option("--inner", inner, "beta draws per variance estimate (0 = theory only)");
    rep_cmd->add_option("--outer", outer, "repeats for the sd of the variance");
    rep_cmd->add_flag("--paper-units", paper_scale, "variances as 1e-3 units with 4 decimals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        std::ofstream file;
        std::ostream& sink = pick_stream(c.output, file, out);
        if (fit_cmd->parsed()) return cmd_fit(c, sink);
        if (var_cmd->parsed()) return cmd_variance(c, target, sink);
        if (adv_cmd->parsed()) return cmd_advise(c, pattern, q1, q_rest, sink);
        if (sim_cmd->parsed())
            return cmd_simulate(setting, n, pattern, q1, q_rest, inner, outer, seed, c, sink);
        if (rep_cmd->parsed()) return cmd_reproduce(table, seed, inner, outer, paper_scale, c, sink);
        err << "no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace delreg::cli
