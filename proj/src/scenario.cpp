#include "occam/scenario.hpp"

#include "occam/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

namespace occam {

namespace {

using Kind = ParseError::Kind;

struct Token {
    std::string text;
    bool quoted = false;
};

struct Line {
    std::size_t number;
    std::vector<Token> tokens;
};

std::vector<Token> tokenize(std::string_view line, std::size_t number) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (i < line.size()) {
        const char c = line[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (c == '#') {
            break;
        }
        Token tok;
        if (c == '"') {
            tok.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                const char q = line[i++];
                if (q == '"') {
                    closed = true;
                    break;
                }
                if (q == '\\') {
                    if (i >= line.size() || (line[i] != '"' && line[i] != '\\')) {
                        throw ParseError(Kind::Lexical, number, "invalid escape in quoted string");
                    }
                    tok.text.push_back(line[i++]);
                    continue;
                }
                tok.text.push_back(q);
            }
            if (!closed) {
                throw ParseError(Kind::Lexical, number, "unterminated quoted string");
            }
            if (i < line.size() && !is_space(line[i]) && line[i] != '#') {
                throw ParseError(Kind::Lexical, number, "quoted string must be followed by whitespace");
            }
        } else {
            while (i < line.size() && !is_space(line[i]) && line[i] != '#') {
                if (line[i] == '"') {
                    throw ParseError(Kind::Lexical, number, "stray quote inside token");
                }
                tok.text.push_back(line[i++]);
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

bool is_identifier(const std::string& s) {
    if (s.empty()) {
        return false;
    }
    const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    const auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) {
        return false;
    }
    for (char c : s) {
        if (!alpha(c) && !digit(c) && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

bool is_decimal_literal(const std::string& s) {
    // [-]digits[.digits][(e|E)[+|-]digits], or [-].digits...
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') {
        ++i;
    }
    std::size_t mantissa_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++mantissa_digits;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++mantissa_digits;
        }
    }
    if (mantissa_digits == 0) {
        return false;
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            ++i;
        }
        std::size_t exp_digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            ++i;
            ++exp_digits;
        }
        if (exp_digits == 0) {
            return false;
        }
    }
    return i == s.size();
}

/// Sequential reader over one line's tokens.
class Cursor {
public:
    explicit Cursor(const Line& line) : line_(line) {}

    bool done() const { return pos_ == line_.tokens.size(); }
    std::size_t line() const { return line_.number; }
    const Token* peek() const { return done() ? nullptr : &line_.tokens[pos_]; }

    const Token& next(const char* what) {
        if (done()) {
            throw ParseError(Kind::Syntax, line(), std::string("expected ") + what + " at end of line");
        }
        return line_.tokens[pos_++];
    }

    void keyword(const char* kw) {
        const Token& t = next(kw);
        if (t.quoted || t.text != kw) {
            throw ParseError(Kind::Syntax, line(), std::string("expected '") + kw + "', found '" + t.text + "'");
        }
    }

    bool accept(const char* kw) {
        if (const Token* t = peek(); t && !t->quoted && t->text == kw) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string identifier(const char* what) {
        const Token& t = next(what);
        if (t.quoted || !is_identifier(t.text)) {
            throw ParseError(Kind::Syntax, line(), std::string("invalid ") + what + " '" + t.text + "'");
        }
        return t.text;
    }

    double number(const char* what) {
        const Token& t = next(what);
        if (t.quoted || !is_decimal_literal(t.text)) {
            throw ParseError(Kind::Lexical, line(),
                             std::string("malformed number '") + t.text + "' for " + what);
        }
        double value = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
            throw ParseError(Kind::Lexical, line(), std::string("number out of range '") + t.text + "' for " + what);
        }
        return value;
    }

    std::vector<double> numbers(const char* what) {
        std::vector<double> out;
        while (!done()) {
            out.push_back(number(what));
        }
        if (out.empty()) {
            throw ParseError(Kind::Syntax, line(), std::string("expected at least one ") + what);
        }
        return out;
    }

    void end() {
        if (!done()) {
            throw ParseError(Kind::Syntax, line(), "unexpected token '" + line_.tokens[pos_].text + "'");
        }
    }

private:
    const Line& line_;
    std::size_t pos_ = 0;
};

enum class Form { Null, Signal, Location, Point };

struct PendingModel {
    std::size_t line;
    std::size_t likelihood_line = 0;
    std::string id;
    double weight = 1.0;
    std::optional<Form> form;
    double noise_sd = 0.0;
    double point_mean = 0.0;
    std::string pattern_id;
    std::optional<GaussianPrior> prior;
    std::vector<AuxiliaryConstraint> constraints;
};

GaussianPrior parse_prior(Cursor& cur) {
    cur.keyword("normal");
    cur.keyword("mean");
    const double mean = cur.number("prior mean");
    cur.keyword("sd");
    const double sd = cur.number("prior sd");
    return GaussianPrior{mean, sd};
}

void parse_likelihood(Cursor& cur, PendingModel& m) {
    const std::string form = cur.identifier("likelihood form");
    if (form == "null") {
        m.form = Form::Null;
        cur.keyword("noise_sd");
        m.noise_sd = cur.number("noise_sd");
    } else if (form == "signal") {
        m.form = Form::Signal;
        cur.keyword("pattern");
        m.pattern_id = cur.identifier("pattern id");
        cur.keyword("noise_sd");
        m.noise_sd = cur.number("noise_sd");
    } else if (form == "location") {
        m.form = Form::Location;
        cur.keyword("noise_sd");
        m.noise_sd = cur.number("noise_sd");
    } else if (form == "point") {
        m.form = Form::Point;
        cur.keyword("mean");
        m.point_mean = cur.number("predicted mean");
        cur.keyword("noise_sd");
        m.noise_sd = cur.number("noise_sd");
    } else {
        throw ParseError(Kind::Syntax, cur.line(), "unknown likelihood form '" + form + "'");
    }

    // Optional clauses are read for every form so that misplaced ones are
    // reported as structural errors rather than stray tokens.
    while (!cur.done()) {
        if (cur.accept("prior")) {
            if (m.prior) {
                throw ParseError(Kind::Structural, cur.line(), "model '" + m.id + "' declares two priors");
            }
            if (!m.constraints.empty()) {
                throw ParseError(Kind::Syntax, cur.line(), "prior must precede constraints");
            }
            m.prior = parse_prior(cur);
        } else if (cur.accept("constraint")) {
            cur.keyword("observed");
            const double observed = cur.number("constraint observation");
            cur.keyword("noise_sd");
            const double sd = cur.number("constraint noise_sd");
            m.constraints.push_back({observed, sd});
        } else {
            cur.end();
        }
    }

    const std::size_t ln = cur.line();
    const bool parameterized = (*m.form == Form::Signal || *m.form == Form::Location);
    if (parameterized && !m.prior) {
        throw ParseError(Kind::Structural, ln, "model '" + m.id + "' needs a prior for its free parameter");
    }
    if (!parameterized && m.prior) {
        throw ParseError(Kind::Structural, ln, "model '" + m.id + "' has no free parameter; prior not allowed");
    }
    if (*m.form != Form::Location && !m.constraints.empty()) {
        throw ParseError(Kind::Structural, ln, "constraints are only allowed on location models");
    }
}

void require_positive(double x, std::size_t line, const std::string& what) {
    if (!(x > 0.0)) {
        throw ParseError(Kind::InvalidValue, line, what + " must be positive");
    }
}

CompositeModel build_model(const PendingModel& m, const std::map<std::string, std::vector<double>>& patterns) {
    const std::size_t ln = m.likelihood_line;
    require_positive(m.noise_sd, ln, "noise_sd of model '" + m.id + "'");
    if (m.prior && m.prior->sd < 0.0) {
        throw ParseError(Kind::InvalidValue, ln, "prior sd of model '" + m.id + "' must be nonnegative");
    }
    for (const AuxiliaryConstraint& c : m.constraints) {
        require_positive(c.noise_sd, ln, "constraint noise_sd of model '" + m.id + "'");
    }
    if (m.prior && m.prior->sd == 0.0 && !m.constraints.empty()) {
        throw ParseError(Kind::Structural, ln, "model '" + m.id + "': a point-mass prior cannot take constraints");
    }

    Likelihood lk;
    switch (*m.form) {
        case Form::Null:
            lk = NullLikelihood{m.noise_sd};
            break;
        case Form::Signal: {
            const auto it = patterns.find(m.pattern_id);
            if (it == patterns.end()) {
                throw ParseError(Kind::UnresolvedPattern, ln, "pattern '" + m.pattern_id + "' is never defined");
            }
            lk = LinearSignalLikelihood{it->second, m.noise_sd};
            break;
        }
        case Form::Location:
            lk = LocationLikelihood{m.noise_sd};
            break;
        case Form::Point:
            lk = PointPredictionLikelihood{m.point_mean, m.noise_sd};
            break;
    }
    try {
        return CompositeModel::make(m.id, m.weight, std::move(lk), m.prior, m.constraints);
    } catch (const DomainError& e) {
        throw ParseError(Kind::InvalidValue, ln, e.what());
    } catch (const UsageError& e) {
        throw ParseError(Kind::Structural, ln, e.what());
    }
}

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

ParseError::ParseError(Kind kind, std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      kind_(kind),
      line_(line),
      message_(message) {}

const char* to_string(ParseError::Kind kind) noexcept {
    switch (kind) {
        case Kind::Lexical: return "lexical";
        case Kind::Syntax: return "syntax";
        case Kind::UnknownDirective: return "unknown-directive";
        case Kind::DuplicateId: return "duplicate-id";
        case Kind::UnresolvedPattern: return "unresolved-pattern";
        case Kind::Structural: return "structural";
        case Kind::InvalidValue: return "invalid-value";
        case Kind::MissingDeclaration: return "missing-declaration";
    }
    return "unknown";
}

ScenarioSpec parse_scenario(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::size_t stop = nl == std::string_view::npos ? text.size() : nl;
        ++number;
        auto tokens = tokenize(text.substr(start, stop - start), number);
        if (!tokens.empty()) {
            lines.push_back({number, std::move(tokens)});
        }
        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    // A final newline terminates the last line rather than starting a new one.
    if (!text.empty() && text.back() == '\n') {
        --number;
    }
    const std::size_t last_line = std::max<std::size_t>(number, 1);

    std::optional<std::string> name;
    std::optional<std::size_t> name_line;
    std::vector<std::pair<std::string, std::vector<double>>> pattern_list;
    std::map<std::string, std::vector<double>> patterns;
    std::vector<PendingModel> pending;
    std::set<std::string> model_ids;
    std::optional<Observation> data;
    std::size_t data_line = 0;

    for (std::size_t k = 0; k < lines.size(); ++k) {
        const Line& line = lines[k];
        Cursor cur(line);
        const Token& head = cur.next("directive");
        if (head.quoted) {
            throw ParseError(Kind::UnknownDirective, line.number, "line must start with a directive");
        }
        const std::string& d = head.text;
        if (d == "format") {
            if (k != 0) {
                throw ParseError(Kind::Syntax, line.number, "'format' must be the first directive");
            }
            const Token& v = cur.next("format version");
            if (v.quoted || v.text != "1") {
                throw ParseError(Kind::Syntax, line.number, "unsupported format version '" + v.text + "'");
            }
            cur.end();
        } else if (d == "scenario") {
            if (name) {
                throw ParseError(Kind::DuplicateId, line.number, "scenario already declared on line " +
                                                                     std::to_string(*name_line));
            }
            const Token& n = cur.next("scenario name");
            if (!n.quoted) {
                throw ParseError(Kind::Syntax, line.number, "scenario name must be a quoted string");
            }
            cur.end();
            name = n.text;
            name_line = line.number;
        } else if (d == "pattern") {
            std::string id = cur.identifier("pattern id");
            std::vector<double> values = cur.numbers("pattern value");
            if (patterns.count(id) != 0) {
                throw ParseError(Kind::DuplicateId, line.number, "pattern '" + id + "' defined twice");
            }
            patterns.emplace(id, values);
            pattern_list.emplace_back(std::move(id), std::move(values));
        } else if (d == "model") {
            if (!pending.empty() && !pending.back().form) {
                throw ParseError(Kind::MissingDeclaration, pending.back().line,
                                 "model '" + pending.back().id + "' has no likelihood");
            }
            PendingModel m;
            m.line = line.number;
            m.id = cur.identifier("model id");
            cur.keyword("weight");
            m.weight = cur.number("weight");
            cur.end();
            if (!model_ids.insert(m.id).second) {
                throw ParseError(Kind::DuplicateId, line.number, "model '" + m.id + "' declared twice");
            }
            require_positive(m.weight, line.number, "weight of model '" + m.id + "'");
            pending.push_back(std::move(m));
        } else if (d == "likelihood") {
            if (pending.empty()) {
                throw ParseError(Kind::Syntax, line.number, "likelihood without a preceding model");
            }
            PendingModel& m = pending.back();
            if (m.form) {
                throw ParseError(Kind::Syntax, line.number, "model '" + m.id + "' already has a likelihood");
            }
            m.likelihood_line = line.number;
            parse_likelihood(cur, m);
        } else if (d == "data") {
            if (data) {
                throw ParseError(Kind::DuplicateId, line.number, "data declared twice");
            }
            const std::string kind = cur.identifier("data kind");
            if (kind == "vector") {
                data = SignalDataset::make(cur.numbers("data value"));
            } else if (kind == "scalar") {
                data = cur.number("data value");
                cur.end();
            } else {
                throw ParseError(Kind::Syntax, line.number, "data kind must be 'vector' or 'scalar'");
            }
            data_line = line.number;
        } else {
            throw ParseError(Kind::UnknownDirective, line.number, "unknown directive '" + d + "'");
        }
    }

    if (!name) {
        throw ParseError(Kind::MissingDeclaration, last_line, "no scenario declared");
    }
    if (pending.empty()) {
        throw ParseError(Kind::MissingDeclaration, last_line, "no models declared");
    }
    if (!pending.back().form) {
        throw ParseError(Kind::MissingDeclaration, pending.back().line,
                         "model '" + pending.back().id + "' has no likelihood");
    }
    if (!data) {
        throw ParseError(Kind::MissingDeclaration, last_line, "no data declared");
    }

    ScenarioSpec spec;
    spec.name = *name;
    spec.patterns = std::move(pattern_list);
    for (const PendingModel& m : pending) {
        CompositeModel model = build_model(m, patterns);
        const DataShape want = data_shape(model.likelihood());
        if (want != data_shape(*data)) {
            throw ParseError(Kind::Structural, data_line,
                             "model '" + m.id + "' needs " +
                                 (want == DataShape::Vector ? "vector" : "scalar") + " data");
        }
        if (const auto* sig = std::get_if<LinearSignalLikelihood>(&model.likelihood())) {
            const std::size_t n = std::get<SignalDataset>(*data).size();
            if (sig->signal_pattern.size() != n) {
                throw ParseError(Kind::Structural, data_line,
                                 "pattern '" + m.pattern_id + "' has " + std::to_string(sig->signal_pattern.size()) +
                                     " values but data has " + std::to_string(n));
            }
            spec.pattern_refs.emplace(m.id, m.pattern_id);
        }
        spec.models.push_back(std::move(model));
    }
    spec.data = std::move(*data);
    return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
    std::string out = "format 1\nscenario " + quote(spec.name) + "\n";
    for (const auto& [id, values] : spec.patterns) {
        out += "pattern " + id;
        for (double v : values) {
            out += " " + format_number(v);
        }
        out += "\n";
    }
    for (const CompositeModel& m : spec.models) {
        out += "model " + m.id() + " weight " + format_number(m.prior_weight()) + "\n  likelihood ";
        std::visit(
            [&](const auto& lk) {
                using T = std::decay_t<decltype(lk)>;
                if constexpr (std::is_same_v<T, NullLikelihood>) {
                    out += "null noise_sd " + format_number(lk.noise_sd);
                } else if constexpr (std::is_same_v<T, LinearSignalLikelihood>) {
                    out += "signal pattern " + spec.pattern_refs.at(m.id()) + " noise_sd " + format_number(lk.noise_sd);
                } else if constexpr (std::is_same_v<T, LocationLikelihood>) {
                    out += "location noise_sd " + format_number(lk.noise_sd);
                } else {
                    out += "point mean " + format_number(lk.predicted_mean) + " noise_sd " + format_number(lk.noise_sd);
                }
            },
            m.likelihood());
        if (const auto& p = m.parameter_prior()) {
            out += " prior normal mean " + format_number(p->mean) + " sd " + format_number(p->sd);
        }
        for (const AuxiliaryConstraint& c : m.constraints()) {
            out += " constraint observed " + format_number(c.observed) + " noise_sd " + format_number(c.noise_sd);
        }
        out += "\n";
    }
    if (const auto* v = std::get_if<SignalDataset>(&spec.data)) {
        out += "data vector";
        for (double y : v->residuals()) {
            out += " " + format_number(y);
        }
        out += "\n";
    } else {
        out += "data scalar " + format_number(std::get<double>(spec.data)) + "\n";
    }
    return out;
}

ScenarioEvaluation evaluate_scenario(const ScenarioSpec& spec, double epsilon) {
    ScenarioEvaluation eval;
    eval.name = spec.name;
    for (const CompositeModel& m : spec.models) {
        eval.evidence.push_back(log_evidence(m, spec.data));
    }
    for (std::size_t i = 0; i < eval.evidence.size(); ++i) {
        for (std::size_t j = i + 1; j < eval.evidence.size(); ++j) {
            eval.bayes_factors.push_back({eval.evidence[i].model_id, eval.evidence[j].model_id,
                                          weight_of_evidence(eval.evidence[i], eval.evidence[j])});
        }
    }
    eval.posterior = model_posterior(spec.models, eval.evidence);
    eval.elimination = elimination_report(std::span<const ModelPosterior>(&eval.posterior, 1), epsilon);
    return eval;
}

}  // namespace occam
