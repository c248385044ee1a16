#include "occam/report_json.hpp"

#include <cmath>

namespace occam {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kJsonDigits = 17;

std::string linear_string(double log_value) {
    if (log_value == std::numeric_limits<double>::infinity()) {
        return "inf";
    }
    return render_linear(LogValue::from_log(log_value), kJsonDigits);
}

Json evidence_json(const std::string& id, LogValue value) {
    Json j;
    j["model_id"] = id;
    j["log_nats"] = json_number(value.log());
    j["log10"] = json_number(value.log10());
    j["linear"] = linear_string(value.log());
    return j;
}

Json bayes_factor_json(const BayesFactorRow& row) {
    Json j;
    j["numerator"] = row.numerator;
    j["denominator"] = row.denominator;
    j["log_nats"] = json_number(row.weight.nats);
    j["log10_bans"] = json_number(row.weight.bans);
    j["linear"] = linear_string(row.weight.nats);
    return j;
}

Json posterior_json(const ModelPosterior& posterior) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        Json j;
        j["model_id"] = posterior.entries()[i].model_id;
        j["probability"] = json_number(posterior.entries()[i].probability);
        j["log_probability"] = json_number(posterior.log_posteriors()[i].log());
        j["linear"] = linear_string(posterior.log_posteriors()[i].log());
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

Json json_number(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return x;
}

Json report_to_json(const CaseReport& report) {
    Json root;
    root["schema"] = kReportSchemaId;
    root["kind"] = "case";
    root["name"] = report.name;

    Json summary = Json::object();
    Json quantities = Json::array();
    for (const ReportValue& v : report.values) {
        summary[v.label] = json_number(v.value);
        Json q;
        q["label"] = v.label;
        q["value"] = json_number(v.value);
        q["units"] = v.units;
        q["note"] = v.note;
        q["domain"] = v.domain == ValueDomain::Log ? "log" : "linear";
        if (v.domain == ValueDomain::Log) {
            q["linear"] = linear_string(v.value);
        }
        quantities.push_back(std::move(q));
    }
    root["summary"] = std::move(summary);
    root["quantities"] = std::move(quantities);

    Json evidence = Json::array();
    for (const EvidenceRow& row : report.evidence) {
        evidence.push_back(evidence_json(row.model_id, row.log_evidence));
    }
    root["evidence"] = std::move(evidence);

    Json factors = Json::array();
    for (const BayesFactorRow& row : report.bayes_factors) {
        factors.push_back(bayes_factor_json(row));
    }
    root["bayes_factors"] = std::move(factors);
    root["posterior"] = posterior_json(report.posterior);
    return root;
}

Json report_to_json(const ScenarioEvaluation& evaluation) {
    Json root;
    root["schema"] = kReportSchemaId;
    root["kind"] = "comparison";
    root["name"] = evaluation.name;
    root["epsilon"] = evaluation.elimination.epsilon;

    Json evidence = Json::array();
    for (const LogEvidence& e : evaluation.evidence) {
        evidence.push_back(evidence_json(e.model_id, e.log_value));
    }
    root["evidence"] = std::move(evidence);

    Json factors = Json::array();
    for (const BayesFactorRow& row : evaluation.bayes_factors) {
        factors.push_back(bayes_factor_json(row));
    }
    root["bayes_factors"] = std::move(factors);
    root["posterior"] = posterior_json(evaluation.posterior);

    Json elimination = Json::array();
    for (const ModelElimination& m : evaluation.elimination.models) {
        Json j;
        j["model_id"] = m.model_id;
        j["eliminated"] = m.eliminated_at.has_value();
        j["step"] = m.eliminated_at ? Json(*m.eliminated_at) : Json(nullptr);
        elimination.push_back(std::move(j));
    }
    root["elimination"] = std::move(elimination);
    root["crisis_steps"] = evaluation.elimination.crisis_steps;
    return root;
}

std::string serialize_report(const CaseReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string serialize_report(const ScenarioEvaluation& evaluation) {
    return report_to_json(evaluation).dump(2) + "\n";
}

}  // namespace occam
