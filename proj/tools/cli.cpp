#include "cli.hpp"

#include "verify.hpp"

#include "occam/case_studies.hpp"
#include "occam/errors.hpp"
#include "occam/report_json.hpp"
#include "occam/scenario.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

namespace occam::cli {

namespace {

struct CliConfig {
    std::string format = "table";
    std::string log_base = "e";
    double epsilon = kDefaultEliminationEpsilon;
};

/// Thrown for bad flag values and unreadable inputs found after parsing.
struct UsageProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sig6(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double in_base(double nats, const CliConfig& cfg) {
    return cfg.log_base == "10" ? nats / std::numbers::ln10 : nats;
}

std::string base_unit(const CliConfig& cfg) { return cfg.log_base == "10" ? "bans" : "nats"; }

std::string log_label(const CliConfig& cfg) { return cfg.log_base == "10" ? "log10" : "ln"; }

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out) const {
        std::vector<std::size_t> widths;
        for (const auto& row : rows_) {
            widths.resize(std::max(widths.size(), row.size()), 0);
            for (std::size_t i = 0; i < row.size(); ++i) {
                widths[i] = std::max(widths[i], row[i].size());
            }
        }
        for (const auto& row : rows_) {
            std::string line = " ";
            for (std::size_t i = 0; i < row.size(); ++i) {
                line += " " + row[i];
                if (i + 1 < row.size()) {
                    line += std::string(widths[i] - row[i].size(), ' ') + " ";
                }
            }
            out << line << "\n";
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

void print_evidence(std::ostream& out, const std::vector<std::pair<std::string, LogValue>>& rows,
                    const CliConfig& cfg) {
    out << "evidence\n";
    Table t({"model", log_label(cfg) + " p(D|M)", "p(D|M)"});
    for (const auto& [id, value] : rows) {
        t.add({id, sig6(in_base(value.log(), cfg)), render_linear(value)});
    }
    t.print(out);
}

void print_bayes_factors(std::ostream& out, const std::vector<BayesFactorRow>& rows, const CliConfig& cfg) {
    if (rows.empty()) {
        return;
    }
    out << "bayes factors\n";
    Table t({"comparison", "weight (" + base_unit(cfg) + ")", "B"});
    for (const BayesFactorRow& r : rows) {
        t.add({r.numerator + " / " + r.denominator, sig6(in_base(r.weight.nats, cfg)),
               std::isinf(r.weight.nats) ? "inf" : render_linear(LogValue::from_log(r.weight.nats))});
    }
    t.print(out);
}

void print_posterior(std::ostream& out, const ModelPosterior& posterior) {
    out << "posterior\n";
    Table t({"model", "p(M|D)", "ln p(M|D)"});
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        t.add({posterior.entries()[i].model_id, render_linear(posterior.log_posteriors()[i]),
               sig6(posterior.log_posteriors()[i].log())});
    }
    t.print(out);
}

void print_case(std::ostream& out, const CaseReport& report, const CliConfig& cfg) {
    out << report.name << "\n\nquantities\n";
    Table q({"quantity", "value", "units", "note"});
    for (const ReportValue& v : report.values) {
        const std::string value = v.domain == ValueDomain::Log ? render_linear(LogValue::from_log(v.value)) +
                                                                     " (ln " + sig6(v.value) + ")"
                                                               : sig6(v.value);
        q.add({v.label, value, v.units.empty() ? "-" : v.units, v.note});
    }
    q.print(out);
    out << "\n";
    std::vector<std::pair<std::string, LogValue>> ev;
    for (const EvidenceRow& r : report.evidence) {
        ev.emplace_back(r.model_id, r.log_evidence);
    }
    print_evidence(out, ev, cfg);
    out << "\n";
    print_bayes_factors(out, report.bayes_factors, cfg);
    out << "\n";
    print_posterior(out, report.posterior);
}

void emit_case(std::ostream& out, const CaseReport& report, const CliConfig& cfg) {
    if (cfg.format == "json") {
        out << serialize_report(report);
    } else {
        print_case(out, report, cfg);
    }
}

std::vector<double> read_numbers(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageProblem("cannot read '" + path + "'");
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream is(line);
        is.imbue(std::locale::classic());
        std::string token;
        while (is >> token) {
            try {
                std::size_t used = 0;
                const double v = std::stod(token, &used);
                if (used != token.size() || !std::isfinite(v)) {
                    throw std::invalid_argument(token);
                }
                values.push_back(v);
            } catch (const std::logic_error&) {
                throw UsageProblem("'" + path + "': malformed number '" + token + "'");
            }
        }
    }
    if (values.empty()) {
        throw UsageProblem("'" + path + "' contains no numbers");
    }
    return values;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageProblem("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct NeptuneArgs {
    bool demo = false;
    std::string pattern_file;
    std::string data_file;
    double amplitude = kNeptuneDemoAmplitude;
    double sigma = 1.0;
    double tau = 1.0;
    std::optional<std::uint64_t> seed;
};

int cmd_mercury(const MercuryParams& params, const CliConfig& cfg, std::ostream& out) {
    emit_case(out, run_mercury_case(params), cfg);
    return kExitOk;
}

int cmd_neptune(const NeptuneArgs& args, const CliConfig& cfg, std::ostream& out) {
    if (args.demo == !args.pattern_file.empty()) {
        throw UsageProblem("neptune: give exactly one of --demo or --pattern");
    }
    if (!args.data_file.empty() && args.demo) {
        throw UsageProblem("neptune: --data needs --pattern");
    }
    const std::vector<double> pattern = args.demo ? neptune_demo_pattern() : read_numbers(args.pattern_file);
    if (std::all_of(pattern.begin(), pattern.end(), [](double g) { return g == 0.0; })) {
        throw UsageProblem("neptune: signal pattern is all zeros");
    }

    SignalDataset data = args.data_file.empty()
                             ? generate_uranus_residuals(pattern, args.amplitude, args.seed ? args.sigma : 0.0,
                                                         args.seed.value_or(0))
                             : SignalDataset::make(read_numbers(args.data_file));
    if (data.size() != pattern.size()) {
        throw UsageProblem("neptune: pattern has " + std::to_string(pattern.size()) + " values but data has " +
                           std::to_string(data.size()));
    }

    const CaseReport report = run_neptune_case(pattern, data, args.sigma, args.tau);
    if (cfg.format == "json") {
        out << serialize_report(report);
        return kExitOk;
    }
    auto list = [](std::span<const double> xs) {
        std::string s;
        for (double x : xs) {
            s += (s.empty() ? "" : " ") + sig6(x);
        }
        return s;
    };
    out << "pattern   " << list(pattern) << "\n";
    out << "residuals " << list(data.residuals()) << "\n";
    out << "sigma " << sig6(args.sigma) << ", tau " << sig6(args.tau);
    if (args.data_file.empty()) {
        out << ", amplitude " << sig6(args.amplitude);
        out << (args.seed ? ", seed " + std::to_string(*args.seed) : std::string(", noiseless"));
    }
    out << "\n\n";
    print_case(out, report, cfg);
    return kExitOk;
}

int cmd_compare(const std::string& path, const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string text = read_file(path);
    ScenarioSpec spec;
    try {
        spec = parse_scenario(text);
    } catch (const ParseError& e) {
        err << path << ":" << e.line() << ": " << to_string(e.kind()) << " error: " << e.message() << "\n";
        return kExitUsage;
    }

    const ScenarioEvaluation eval = evaluate_scenario(spec, cfg.epsilon);
    if (cfg.format == "json") {
        out << serialize_report(eval);
        return kExitOk;
    }
    out << "scenario \"" << eval.name << "\" (" << spec.models.size()
        << (spec.models.size() == 1 ? " model" : " models") << ")\n\n";
    std::vector<std::pair<std::string, LogValue>> ev;
    for (const LogEvidence& e : eval.evidence) {
        ev.emplace_back(e.model_id, e.log_value);
    }
    print_evidence(out, ev, cfg);
    out << "\n";
    if (!eval.bayes_factors.empty()) {
        print_bayes_factors(out, eval.bayes_factors, cfg);
        out << "\n";
    }
    print_posterior(out, eval.posterior);
    out << "\nelimination (epsilon " << sig6(cfg.epsilon) << ")\n";
    Table t({"model", "status"});
    for (const ModelElimination& m : eval.elimination.models) {
        t.add({m.model_id, m.eliminated_at ? "eliminated" : "retained"});
    }
    t.print(out);
    return kExitOk;
}

int cmd_verify(double rel_tol, const CliConfig& cfg, std::ostream& out) {
    VerifyOptions options;
    options.rel_tol = rel_tol;
    const VerifyResult result = run_verification(options);

    if (cfg.format == "json") {
        nlohmann::ordered_json root;
        root["schema"] = kReportSchemaId;
        root["kind"] = "verification";
        root["rel_tol"] = result.rel_tol;
        root["seed"] = result.seed;
        root["passed"] = result.passed();
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (const VerifyCheck& c : result.checks) {
            nlohmann::ordered_json j;
            j["name"] = c.name;
            j["instances"] = c.instances;
            j["max_deviation"] = json_number(c.max_deviation);
            j["failures"] = c.failures;
            checks.push_back(std::move(j));
        }
        root["checks"] = std::move(checks);
        out << root.dump(2) << "\n";
    } else {
        out << "verify: rel_tol " << sig6(result.rel_tol) << ", seed " << result.seed << "\n";
        Table t({"check", "instances", "max deviation", "status"});
        for (const VerifyCheck& c : result.checks) {
            t.add({c.name, std::to_string(c.instances), sig6(c.max_deviation),
                   c.failures.empty() ? "ok" : std::to_string(c.failures.size()) + " failed"});
        }
        t.print(out);
        for (const VerifyCheck& c : result.checks) {
            for (const std::string& f : c.failures) {
                out << "  FAIL " << c.name << ": " << f << "\n";
            }
        }
        out << (result.passed() ? "result: pass\n" : "result: FAIL\n");
    }
    return result.passed() ? kExitOk : kExitEvaluationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian model comparison and elimination", "occam"};
    app.require_subcommand(1);
    app.fallthrough();

    CliConfig cfg;
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    app.add_option("--log-base", cfg.log_base, "Log base for displayed weights of evidence")
        ->check(CLI::IsMember({"e", "10"}))
        ->capture_default_str();
    app.add_option("--epsilon", cfg.epsilon, "Elimination threshold on posterior probability")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
                double v = 0.0;
                try {
                    v = std::stod(s);
                } catch (const std::exception&) {
                    return "not a number: " + s;
                }
                return (v > 0.0 && v < 1.0) ? "" : "must lie in (0, 1)";
            },
            "(0,1)"))
        ->capture_default_str();

    MercuryParams mercury;
    auto* mercury_cmd = app.add_subcommand("mercury", "Mercury perihelion: Newton + Vulcan vs general relativity");
    mercury_cmd->add_option("--y", mercury.y, "Observed anomalous precession (arcsec/century)")->capture_default_str();
    mercury_cmd->add_option("--sigma", mercury.sigma, "Measurement sd of y")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mercury_cmd->add_option("--tau", mercury.tau, "Prior sd of the Vulcan effect")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mercury_cmd->add_option("--w", mercury.w, "Summary of null searches for Vulcan")->capture_default_str();
    mercury_cmd->add_option("--sigma2", mercury.sigma2, "sd of w")->check(CLI::PositiveNumber)->capture_default_str();

    NeptuneArgs neptune;
    std::uint64_t seed = 0;
    auto* neptune_cmd = app.add_subcommand("neptune", "Signal detection in orbital residuals: H0 vs H1");
    neptune_cmd->add_flag("--demo", neptune.demo, "Built-in pattern [1,1,1,1] with amplitude 2");
    neptune_cmd->add_option("--pattern", neptune.pattern_file, "File of signal-pattern values");
    neptune_cmd->add_option("--data", neptune.data_file, "File of residuals (default: synthesize)");
    neptune_cmd->add_option("--amplitude", neptune.amplitude, "Amplitude of synthesized residuals")
        ->capture_default_str();
    neptune_cmd->add_option("--sigma", neptune.sigma, "Noise sd")->check(CLI::PositiveNumber)->capture_default_str();
    neptune_cmd->add_option("--tau", neptune.tau, "Prior sd of the amplitude")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    auto* seed_opt = neptune_cmd->add_option("--seed", seed, "Seed for synthetic noise (omit for noiseless)");

    std::string scenario_path;
    auto* compare_cmd = app.add_subcommand("compare", "Evaluate the model space in a scenario file");
    compare_cmd->add_option("file", scenario_path, "Scenario file")->required();

    double rel_tol = 1e-8;
    auto* verify_cmd = app.add_subcommand("verify", "Check analytic evidences against quadrature");
    verify_cmd->add_option("--rel-tol", rel_tol, "Tolerance on relative deviation")
        ->check(CLI::Range(0.0, 0.1))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "occam: " << e.what() << "\n";
        return kExitUsage;
    }
    if (verify_cmd->parsed() && !(rel_tol > 0.0)) {
        err << "occam: --rel-tol must lie in (0, 0.1]\n";
        return kExitUsage;
    }
    if (*seed_opt) {
        neptune.seed = seed;
    }

    try {
        if (mercury_cmd->parsed()) {
            return cmd_mercury(mercury, cfg, out);
        }
        if (neptune_cmd->parsed()) {
            return cmd_neptune(neptune, cfg, out);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(scenario_path, cfg, out, err);
        }
        return cmd_verify(rel_tol, cfg, out);
    } catch (const UsageProblem& e) {
        err << "occam: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "occam: evaluation failed: " << e.what() << "\n";
        return kExitEvaluationFailure;
    }
}

}  // namespace occam::cli
