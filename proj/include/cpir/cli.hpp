#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cpir/causal_maxent.hpp"
#include "cpir/counting.hpp"
#include "cpir/entropy.hpp"
#include "cpir/igci.hpp"
#include "cpir/maxent.hpp"
#include "cpir/pir.hpp"
#include "cpir/serialize.hpp"

namespace cpir::cli {

using json::Json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_infeasible = 2, exit_invalid = 3, exit_size_cap = 4 };

inline int exit_code_for(ErrorCode code) { return code == ErrorCode::size_cap ? exit_size_cap : exit_invalid; }

struct Flags {
    std::optional<std::string> task;
    std::optional<std::string> cause;
    std::optional<std::vector<std::string>> order;
    std::optional<std::string> scope;
    std::optional<double> epsilon;
    std::optional<std::size_t> grid;
    std::optional<double> pen_width;
    std::optional<unsigned> seed;
    std::string format = "table";
};

struct Scenario {
    int version = kSchemaVersion;
    std::string name;
    std::string description;
    std::optional<FiniteDomain> domain;
    std::optional<Relation> relation;
    std::vector<LinearConstraint> constraints;
    std::optional<Dag> dag;
    Json samples;
    Json task;  // always an object with at least "name"
};

struct Fixture {
    std::string name;
    std::string file;
    std::string description;
};

inline const std::vector<Fixture>& catalog() {
    static const std::vector<Fixture> fixtures = {
        {"device", "device.json", "ball device relation, Causal PIR from the top entry"},
        {"pearl-puzzle", "pearl-puzzle.json", "two friends and a third party, causal vs symmetric PIR"},
        {"chain-N", "chain-n.json", "binary chain X_j = 0 implies X_{j+1} = 0, N = 3"},
        {"parity", "parity.json", "E[X1*X2] = 1 with no edges; infeasible at step 2"},
        {"sun-lauderdale-grid", "sun-lauderdale-grid.json", "41-point grid, moments of X and Y, causal vs classical"},
        {"appendix-timeseries", "appendix-timeseries.json", "13 admissible triples, uniform vs sequential choice"},
        {"igci-square", "igci-square.json", "IGCI score and fat-pen counts for f(x) = x^2"},
    };
    return fixtures;
}

inline std::filesystem::path scenario_dir() {
    if (const char* env = std::getenv("CPIR_SCENARIO_DIR")) return env;
#ifdef CPIR_SCENARIO_DIR
    return CPIR_SCENARIO_DIR;
#else
    return "scenarios";
#endif
}

/// A path, or the name of a bundled fixture.
inline std::filesystem::path resolve(const std::string& arg) {
    if (std::filesystem::exists(arg)) return arg;
    for (const auto& f : catalog())
        if (f.name == arg || f.file == arg) return scenario_dir() / f.file;
    const auto under = scenario_dir() / std::filesystem::path(arg).filename();
    if (std::filesystem::exists(under)) return under;
    throw ValidationError("scenario file '" + arg + "' not found");
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string label(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

inline Variable parse_variable(const Json& v, const Flags& flags) {
    if (!v.is_object() || !v.contains("name")) throw ValidationError("variable needs a 'name'");
    Variable out{v.at("name").get<std::string>(), {}};
    if (v.contains("values")) {
        for (const auto& x : v.at("values")) out.values.push_back(label(x));
    } else if (v.contains("grid")) {
        const Json& g = v.at("grid");
        const double start = g.at("start").get<double>();
        const double stop = g.at("stop").get<double>();
        const std::size_t points = flags.grid.value_or(g.at("points").get<std::size_t>());
        if (points < 2) throw ValidationError("grid variable '" + out.name + "' needs at least two points");
        for (std::size_t i = 0; i < points; ++i)
            out.values.push_back(json::format12(start + (stop - start) * static_cast<double>(i) / (points - 1)));
    } else {
        throw ValidationError("variable '" + out.name + "' needs 'values' or 'grid'");
    }
    return out;
}

/// Product of powers of variable values, "E[X]", "E[X^2]", "E[X*Y]".
inline std::vector<double> expand_moment(const FiniteDomain& d, const std::string& spec) {
    std::string s;
    for (char c : spec)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.size() < 4 || s.substr(0, 2) != "E[" || s.back() != ']')
        throw ValidationError("moment '" + spec + "' must look like E[X], E[X^2] or E[X*Y]");
    const std::string body = s.substr(2, s.size() - 3);
    std::vector<std::pair<std::size_t, int>> factors;
    std::stringstream ss(body);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        int power = 1;
        const auto caret = factor.find('^');
        std::string name = factor.substr(0, caret);
        if (caret != std::string::npos) {
            const std::string p = factor.substr(caret + 1);
            if (p.empty() || !std::all_of(p.begin(), p.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                throw ValidationError("moment '" + spec + "' has a malformed power");
            power = std::stoi(p);
        }
        if (!d.has(name)) throw ValidationError("moment '" + spec + "' names unknown variable '" + name + "'");
        factors.emplace_back(d.index_of(name), power);
    }
    if (factors.empty()) throw ValidationError("moment '" + spec + "' is empty");
    for (const auto& [var, power] : factors)
        for (std::size_t k = 0; k < d.variable(var).values.size(); ++k)
            if (!d.numeric_value(var, k))
                throw ValidationError("moment '" + spec + "' needs numeric labels for '" + d.variable(var).name +
                                      "'; supply an f table instead");
    std::vector<double> f(d.size(), 1.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (const auto& [var, power] : factors) f[i] *= std::pow(*d.numeric_value(var, d.digit(i, var)), power);
    return f;
}

inline LinearConstraint parse_constraint(const FiniteDomain& d, const Json& c, const Flags& flags) {
    if (!c.contains("id") || !c.contains("target")) throw ValidationError("constraint needs 'id' and 'target'");
    const std::string id = c.at("id").get<std::string>();
    std::vector<double> f;
    if (c.contains("moment")) {
        f = expand_moment(d, c.at("moment").get<std::string>());
    } else if (c.contains("f")) {
        f = c.at("f").get<std::vector<double>>();
    } else {
        throw ValidationError("constraint '" + id + "' needs 'moment' or 'f'");
    }
    const double eps = flags.epsilon.value_or(c.value("epsilon", 0.0));
    return LinearConstraint(id, d, std::move(f), c.at("target").get<double>(), eps);
}

}  // namespace detail

inline Scenario parse_scenario(const Json& j, const Flags& flags = {}) {
    if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
    Scenario s;
    s.version = j.value("version", 0);
    if (s.version != kSchemaVersion)
        throw ValidationError("unsupported scenario version " + std::to_string(s.version) + ", expected " +
                              std::to_string(kSchemaVersion));
    s.name = j.value("name", std::string("scenario"));
    s.description = j.value("description", std::string());
    if (j.contains("domain")) {
        std::vector<Variable> vars;
        for (const auto& v : j.at("domain").at("variables")) vars.push_back(detail::parse_variable(v, flags));
        s.domain = FiniteDomain(std::move(vars));
    }
    if (j.contains("relation")) {
        if (!s.domain) throw ValidationError("a relation needs a domain");
        s.relation = json::relation_from_json(*s.domain, j.at("relation"));
        if (s.relation->empty()) throw ValidationError("relation is empty");
    }
    if (j.contains("constraints")) {
        if (!s.domain) throw ValidationError("constraints need a domain");
        for (const auto& c : j.at("constraints")) s.constraints.push_back(detail::parse_constraint(*s.domain, c, flags));
    }
    if (j.contains("dag")) {
        s.dag = json::dag_from_json(j.at("dag"));
        if (!s.domain) throw ValidationError("a graph needs a domain");
        for (const auto& n : s.dag->nodes())
            if (!s.domain->has(n)) throw ValidationError("graph node '" + n + "' is not a domain variable");
    }
    s.samples = j.value("samples", Json());
    s.task = j.value("task", Json::object());
    if (s.task.is_string()) s.task = Json{{"name", s.task.get<std::string>()}};
    if (flags.task) s.task["name"] = *flags.task;
    if (!s.task.contains("name")) throw ValidationError("scenario has no task");
    return s;
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path, const Flags& flags = {}) {
    return parse_scenario(read_json_file(path), flags);
}

// ---------------------------------------------------------------- reports

struct TableView {
    std::string title;
    std::vector<std::string> columns;             // variable names
    std::vector<std::vector<std::string>> rows;   // labels, then probability
};

struct Report {
    int exit_code = exit_ok;
    std::string status = "ok";
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<TableView> tables;
    Json data = Json::object();

    void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
};

inline std::string fmt(double v) { return json::format12(v); }
inline std::string fmt(const Rational& v) { return to_fraction_string(v); }

template <class Scalar>
TableView view(const std::string& title, const Table<Scalar>& t, bool skip_zero = false) {
    TableView out{title, variable_names(t.domain()), {}};
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (skip_zero && t[i] == 0) continue;
        auto row = t.domain().labels(i);
        row.push_back(fmt(t[i]));
        out.rows.push_back(std::move(row));
    }
    return out;
}

template <class Scalar>
TableView view(const std::string& title, const Conditional<Scalar>& c) {
    TableView out{title, variable_names(c.given()), {}};
    for (const auto& v : c.target().variables())
        for (const auto& value : v.values) out.columns.push_back(v.name + "=" + value);
    for (std::size_t g = 0; g < c.given().size(); ++g) {
        auto row = c.given().labels(g);
        for (std::size_t t = 0; t < c.target().size(); ++t) row.push_back(fmt(c(g, t)));
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline std::string render_table(const Report& r) {
    std::ostringstream out;
    std::size_t key_width = 0;
    for (const auto& [k, v] : r.summary) key_width = std::max(key_width, k.size());
    for (const auto& [k, v] : r.summary) out << k << std::string(key_width - k.size(), ' ') << "  " << v << "\n";
    for (const auto& t : r.tables) {
        out << "\n" << t.title << "\n";
        std::vector<std::string> header = t.columns;
        if (!t.rows.empty() && t.rows.front().size() == header.size() + 1) header.push_back("p");
        std::vector<std::size_t> width(header.size(), 0);
        for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
        for (const auto& row : t.rows)
            for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c)
                out << (c ? "  " : "  ") << cells[c] << std::string(width[c] - cells[c].size(), ' ');
            out << "\n";
        };
        line(header);
        for (const auto& row : t.rows) line(row);
    }
    return out.str();
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// One row per domain point of the first table; key,value rows when the
/// task produced no distribution.
inline std::string render_csv(const Report& r) {
    std::ostringstream out;
    if (r.tables.empty()) {
        out << "key,value\n";
        for (const auto& [k, v] : r.summary) out << csv_escape(k) << "," << csv_escape(v) << "\n";
        return out.str();
    }
    const TableView& t = r.tables.front();
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_escape(t.columns[c]);
    if (!t.rows.empty() && t.rows.front().size() == t.columns.size() + 1) out << ",probability";
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(row[c]);
        out << "\n";
    }
    return out.str();
}

inline std::string render_json(const Report& r, const Scenario& s) {
    Json out = r.data;
    out["scenario"] = s.name;
    out["task"] = s.task.at("name");
    out["status"] = r.status;
    out["exit_code"] = r.exit_code;
    return out.dump(2) + "\n";
}

inline std::string render(const Report& r, const Scenario& s, const std::string& format) {
    if (format == "json") return render_json(r, s);
    if (format == "csv") return render_csv(r);
    return render_table(r);
}

// ---------------------------------------------------------------- tasks

namespace detail {

inline const FiniteDomain& need_domain(const Scenario& s) {
    if (!s.domain) throw ValidationError("task '" + s.task.at("name").get<std::string>() + "' needs a domain");
    return *s.domain;
}

inline const Relation& need_relation(const Scenario& s) {
    if (!s.relation) throw ValidationError("task '" + s.task.at("name").get<std::string>() + "' needs a relation");
    return *s.relation;
}

inline std::vector<std::string> string_list(const Json& j) {
    if (j.is_string()) return {j.get<std::string>()};
    return j.get<std::vector<std::string>>();
}

inline std::optional<std::vector<std::string>> causes(const Scenario& s, const Flags& flags) {
    if (flags.cause) return std::vector<std::string>{*flags.cause};
    if (s.task.contains("cause")) return string_list(s.task.at("cause"));
    if (s.task.contains("causes")) return string_list(s.task.at("causes"));
    return std::nullopt;
}

inline std::vector<LinearConstraint> all_constraints(const Scenario& s) {
    std::vector<LinearConstraint> out = s.constraints;
    if (s.relation) out.insert(out.begin(), relation_to_constraint(*s.relation));
    return out;
}

inline std::vector<std::size_t> observations(const Scenario& s) {
    const FiniteDomain& d = need_domain(s);
    if (!s.samples.is_array() || s.samples.empty()) throw ValidationError("task needs a nonempty 'samples' list");
    std::vector<std::size_t> out;
    for (const auto& p : s.samples) out.push_back(json::point_from_json(d, p));
    return out;
}

/// P(event) and P(query | event) for label assignments.
inline std::pair<Rational, std::optional<Rational>> event_probability(const ExactTable& t, const Json& event,
                                                                     const Json& query) {
    const FiniteDomain& d = t.domain();
    auto matches = [&](std::size_t flat, const Json& spec) {
        for (const auto& [name, value] : spec.items())
            if (d.variable(d.index_of(name)).values[d.digit(flat, d.index_of(name))] != label(value)) return false;
        return true;
    };
    for (const Json* spec : {&event, &query})
        for (const auto& [name, value] : spec->items()) d.value_index(d.index_of(name), label(value));
    Rational pe = 0;
    Rational pq = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (matches(i, event)) {
            pe += t[i];
            if (matches(i, query)) pq += t[i];
        }
    if (query.empty() || pe == 0) return {pe, std::nullopt};
    return {pe, pq / pe};
}

inline std::size_t strict_local_maxima(const std::vector<double>& p) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool left = i == 0 || p[i] > p[i - 1];
        const bool right = i + 1 == p.size() || p[i] > p[i + 1];
        if (left && right) ++out;
    }
    return out;
}

inline causal::Options causal_options(const Scenario& s, const Flags& flags) {
    causal::Options opt;
    if (flags.order) opt.order = *flags.order;
    else if (s.task.contains("order")) opt.order = string_list(s.task.at("order"));
    const std::string scope = flags.scope.value_or(s.task.value("feasibility_scope", std::string("general")));
    if (scope == "general") opt.scope = causal::FeasibilityScope::general;
    else if (scope == "markov") opt.scope = causal::FeasibilityScope::markov;
    else throw ValidationError("feasibility scope must be 'general' or 'markov', got '" + scope + "'");
    opt.seed = flags.seed.value_or(s.task.value("seed", 0u));
    return opt;
}

inline Json fit_json(const causal::CausalFitResult& r) {
    Json steps = Json::array();
    for (const auto& st : r.steps)
        steps.push_back({{"node", st.node},
                         {"parents", st.parents},
                         {"solver", st.solver},
                         {"iterations", st.iterations},
                         {"conditional_entropy_bits", json::number(bits(st.conditional_entropy))},
                         {"conditional", json::to_json(st.conditional)}});
    Json out = {{"order", r.order},
                {"feasibility_scope", causal::to_string(r.scope)},
                {"status", causal::to_string(r.status)},
                {"steps", steps},
                {"residuals", json::numbers(r.residuals)},
                {"markov_residual", json::number(r.markov_residual)}};
    if (r.status == causal::FitStatus::infeasible) out["failed_step"] = r.failed_step;
    if (r.joint) out["joint"] = json::to_json(*r.joint);
    if (!r.alternatives.empty()) {
        Json alts = Json::array();
        for (const auto& a : r.alternatives) alts.push_back(fit_json(a));
        out["alternatives"] = alts;
    }
    return out;
}

inline causal::CausalFitResult run_causal(const Scenario& s, const Flags& flags) {
    const FiniteDomain& d = need_domain(s);
    causal::Options opt = causal_options(s, flags);
    const auto cs = all_constraints(s);
    if (s.dag && !flags.cause) return causal::causal_maxent_dag(d, cs, *s.dag, opt);
    const auto c = causes(s, flags);
    if (!c || c->size() != 1) throw ValidationError("causal MaxEnt needs a graph or a single --cause");
    return causal::causal_maxent_bivariate(d, cs, c->front(), opt);
}

inline void describe_fit(Report& rep, const causal::CausalFitResult& r, const std::string& prefix = "") {
    std::string order;
    for (const auto& n : r.order) order += (order.empty() ? "" : ",") + n;
    rep.note(prefix + "order", order);
    rep.note(prefix + "feasibility scope", causal::to_string(r.scope));
    if (r.status == causal::FitStatus::infeasible) {
        rep.note(prefix + "status", "infeasible at step " + std::to_string(r.failed_step));
    } else {
        rep.note(prefix + "status", causal::to_string(r.status));
    }
    for (const auto& st : r.steps) {
        rep.note(prefix + "H(" + st.node + "|pa) bits", fmt(bits(st.conditional_entropy)));
        std::string title = "P(" + st.node;
        if (!st.parents.empty()) {
            title += " | ";
            for (std::size_t i = 0; i < st.parents.size(); ++i) title += (i ? "," : "") + st.parents[i];
        }
        rep.tables.push_back(view(prefix + title + ")", st.conditional));
    }
    if (r.joint) {
        rep.note(prefix + "H(joint) bits", fmt(bits(entropy(*r.joint))));
        double worst = 0.0;
        for (double v : r.residuals) worst = std::max(worst, v);
        rep.note(prefix + "max residual", fmt(worst));
        rep.tables.insert(rep.tables.begin(), view("causal MaxEnt joint", *r.joint));
    }
    for (std::size_t a = 0; a < r.alternatives.size(); ++a) {
        const auto& alt = r.alternatives[a];
        if (alt.joint) rep.tables.push_back(view(prefix + "alternative " + std::to_string(a + 1), *alt.joint, true));
    }
}

inline Report task_pir(const Scenario& s, const Flags& flags) {
    const Relation& rel = need_relation(s);
    Report rep;
    const auto c = causes(s, flags);
    const ExactTable joint = c ? pir::causal_pir_joint(rel, *c) : pir::symmetric_pir_joint(rel);
    std::string label = "symmetric";
    if (c) {
        label = "";
        for (const auto& x : *c) label += (label.empty() ? "" : ",") + x;
    }
    rep.note("relation size", std::to_string(rel.size()));
    rep.note("causes", label);
    rep.note("H(joint) bits", fmt(bits(entropy(joint).value())));
    rep.tables.push_back(view(c ? "Causal PIR joint" : "symmetric PIR joint", joint));
    rep.data = {{"relation", json::to_json(rel)}, {"causes", c ? Json(*c) : Json("symmetric")}, {"joint", json::to_json(joint)}};
    return rep;
}

inline Report task_pir_compare(const Scenario& s, const Flags& flags) {
    const Relation& rel = need_relation(s);
    const auto c = causes(s, flags);
    if (!c) throw ValidationError("pir-compare needs causes");
    const ExactTable causal = pir::causal_pir_joint(rel, *c);
    const ExactTable symmetric = pir::symmetric_pir_joint(rel);
    Report rep;
    rep.note("relation size", std::to_string(rel.size()));
    rep.data = {{"relation_size", rel.size()},
                {"causal_joint", json::to_json(causal)},
                {"symmetric_joint", json::to_json(symmetric)}};
    rep.tables.push_back(view("Causal PIR joint", causal));
    rep.tables.push_back(view("symmetric PIR joint", symmetric));
    if (c->size() >= 2) {
        const auto mi_c = mutual_information(causal, {(*c)[0]}, {(*c)[1]}).normalized();
        const auto mi_s = mutual_information(symmetric, {(*c)[0]}, {(*c)[1]}).normalized();
        const bool ind_c = pir::independent(causal, (*c)[0], (*c)[1]);
        const bool ind_s = pir::independent(symmetric, (*c)[0], (*c)[1]);
        const std::string pair = (*c)[0] + ";" + (*c)[1];
        rep.note("causal I(" + pair + ") nats", mi_c.to_string());
        rep.note("symmetric I(" + pair + ") nats", mi_s.to_string());
        rep.note("causal independent", ind_c ? "yes" : "no");
        rep.note("symmetric independent", ind_s ? "yes" : "no");
        rep.data["causal_mutual_information"] = {{"exact", mi_c.to_string()}, {"nats", json::number(mi_c.value())}};
        rep.data["symmetric_mutual_information"] = {{"exact", mi_s.to_string()}, {"nats", json::number(mi_s.value())}};
        rep.data["causal_independent"] = ind_c;
        rep.data["symmetric_independent"] = ind_s;
    }
    if (s.task.contains("event")) {
        const Json query = s.task.value("query", Json::object());
        for (const auto& [name, joint] : {std::pair<std::string, const ExactTable*>{"causal", &causal},
                                          std::pair<std::string, const ExactTable*>{"symmetric", &symmetric}}) {
            const auto [pe, pq] = event_probability(*joint, s.task.at("event"), query);
            rep.note(name + " P(event)", fmt(pe));
            rep.data[name + "_event_probability"] = fmt(pe);
            if (pq) {
                rep.note(name + " P(query | event)", fmt(*pq));
                rep.data[name + "_query_given_event"] = fmt(*pq);
            }
        }
    }
    if (s.task.contains("marginal")) {
        const auto keep = string_list(s.task.at("marginal"));
        const ExactTable mc = marginalize(causal, keep);
        const ExactTable ms = marginalize(symmetric, keep);
        rep.tables.push_back(view("Causal PIR marginal", mc));
        rep.tables.push_back(view("symmetric PIR marginal", ms));
        rep.data["causal_marginal"] = json::to_json(mc);
        rep.data["symmetric_marginal"] = json::to_json(ms);
    }
    return rep;
}

inline Report task_infer_direction(const Scenario& s, const Flags&) {
    const Relation& rel = need_relation(s);
    const auto obs = observations(s);
    const auto call = pir::infer_direction(rel, obs);
    const auto names = variable_names(rel.domain());
    Report rep;
    rep.note("samples", std::to_string(obs.size()));
    rep.note("likelihood " + names[0] + "->" + names[1], fmt(call.forward));
    rep.note("likelihood " + names[1] + "->" + names[0], fmt(call.backward));
    rep.note("verdict", pir::to_string(call.verdict));
    rep.data = {{"samples", obs.size()},
                {"likelihood_forward", fmt(call.forward)},
                {"likelihood_backward", fmt(call.backward)},
                {"verdict", pir::to_string(call.verdict)}};
    return rep;
}

inline Report task_maxent(const Scenario& s, const Flags&) {
    const FiniteDomain& d = need_domain(s);
    const auto cs = all_constraints(s);
    const auto sol = maxent::solve(d, cs);
    Report rep;
    rep.note("status", maxent::to_string(sol.status));
    rep.note("iterations", std::to_string(sol.iterations));
    rep.note("max residual", fmt(sol.max_residual()));
    for (std::size_t k = 0; k < cs.size() && k < sol.multipliers.size(); ++k)
        rep.note("lambda[" + cs[k].id + "]", fmt(sol.multipliers[k]));
    rep.tables.push_back(view(sol.status == maxent::Status::infeasible ? "closest point" : "MaxEnt distribution",
                              sol.distribution));
    Json ids = Json::array();
    for (const auto& c : cs) ids.push_back(c.id);
    rep.data = {{"status", maxent::to_string(sol.status)},
                {"iterations", sol.iterations},
                {"constraint_ids", ids},
                {"multipliers", json::numbers(sol.multipliers)},
                {"residuals", json::numbers(sol.residuals)},
                {"dropped", sol.dropped},
                {"distribution", json::to_json(sol.distribution)}};
    if (sol.status == maxent::Status::infeasible) {
        rep.status = "infeasible";
        rep.exit_code = exit_infeasible;
        if (sol.feasibility) rep.note("min squared residual", fmt(sol.feasibility->min_squared_residual));
    } else {
        rep.note("H bits", fmt(bits(entropy(sol.distribution))));
    }
    return rep;
}

inline Report task_feasibility(const Scenario& s, const Flags&) {
    const FiniteDomain& d = need_domain(s);
    const auto rep_f = maxent::feasibility(d, all_constraints(s));
    Report rep;
    rep.note("feasible", rep_f.feasible ? "yes" : "no");
    rep.note("min squared residual", fmt(rep_f.min_squared_residual));
    rep.data = {{"feasible", rep_f.feasible}, {"min_squared_residual", json::number(rep_f.min_squared_residual)}};
    if (rep_f.witness) {
        rep.tables.push_back(view("witness", *rep_f.witness));
        rep.data["witness"] = json::to_json(*rep_f.witness);
    } else {
        rep.tables.push_back(view("closest point", rep_f.closest));
        rep.data["closest"] = json::to_json(rep_f.closest);
        rep.status = "infeasible";
        rep.exit_code = exit_infeasible;
    }
    return rep;
}

inline void finish_fit(Report& rep, const causal::CausalFitResult& r) {
    if (r.status == causal::FitStatus::infeasible) {
        rep.status = "infeasible at step " + std::to_string(r.failed_step);
        rep.exit_code = exit_infeasible;
    } else {
        rep.status = causal::to_string(r.status);
    }
}

inline Report task_causal(const Scenario& s, const Flags& flags) {
    const auto r = run_causal(s, flags);
    Report rep;
    describe_fit(rep, r);
    rep.data = fit_json(r);
    finish_fit(rep, r);
    return rep;
}

inline Report task_maxent_compare(const Scenario& s, const Flags& flags) {
    const FiniteDomain& d = need_domain(s);
    const auto r = run_causal(s, flags);
    const auto classical = maxent::solve(d, all_constraints(s));
    Report rep;
    describe_fit(rep, r, "causal ");
    rep.note("classical status", maxent::to_string(classical.status));
    rep.note("classical H bits", fmt(bits(entropy(classical.distribution))));
    rep.note("classical max residual", fmt(classical.max_residual()));
    rep.tables.insert(rep.tables.begin() + (r.joint ? 1 : 0), view("classical MaxEnt joint", classical.distribution));
    rep.data = {{"causal", fit_json(r)},
                {"classical",
                 {{"status", maxent::to_string(classical.status)},
                  {"residuals", json::numbers(classical.residuals)},
                  {"entropy_bits", json::number(bits(entropy(classical.distribution)))},
                  {"distribution", json::to_json(classical.distribution)}}}};
    if (r.joint) rep.data["causal"]["entropy_bits"] = json::number(bits(entropy(*r.joint)));
    const std::string first = r.order.empty() ? variable_names(d).front() : r.order.front();
    if (r.joint) {
        const auto pc = marginalize(*r.joint, {first}).weights();
        const auto pm = marginalize(classical.distribution, {first}).weights();
        rep.note("causal local maxima of P(" + first + ")", std::to_string(strict_local_maxima(pc)));
        rep.note("classical local maxima of P(" + first + ")", std::to_string(strict_local_maxima(pm)));
        rep.data["causal"]["first_marginal_local_maxima"] = strict_local_maxima(pc);
        rep.data["classical"]["first_marginal_local_maxima"] = strict_local_maxima(pm);
    }
    finish_fit(rep, r);
    if (classical.status == maxent::Status::infeasible) {
        rep.status = "infeasible";
        rep.exit_code = exit_infeasible;
    }
    return rep;
}

inline Report task_census(const Scenario& s, const Flags& flags) {
    const Relation& rel = need_relation(s);
    const auto c = causes(s, flags);
    if (!c) throw ValidationError("census needs a cause");
    const std::size_t n = s.task.value("n", std::size_t{8});
    std::vector<Rational> deltas = counting::default_deltas();
    if (s.task.contains("deltas")) {
        deltas.clear();
        for (const auto& x : s.task.at("deltas")) deltas.push_back(parse_rational(detail::label(x)));
    }
    const auto census = counting::concentration_census(rel, *c, n, deltas);
    Report rep;
    rep.note("n", std::to_string(n));
    rep.note("type classes", std::to_string(census.type_classes));
    Json records = Json::array();
    for (const auto& r : census.records) {
        rep.note("mass " + r.measure + " measure near " + r.reference + " joint, delta " + fmt(r.delta), fmt(r.mass));
        records.push_back({{"n", r.n}, {"delta", fmt(r.delta)}, {"measure", r.measure}, {"reference", r.reference},
                           {"mass", fmt(r.mass)}});
    }
    rep.tables.push_back(view("expected empirical joint, causal measure", census.expected_causal));
    rep.tables.push_back(view("expected empirical joint, uniform measure", census.expected_uniform));
    rep.data = {{"records", records},
                {"type_classes", census.type_classes},
                {"expected_causal", json::to_json(census.expected_causal)},
                {"expected_uniform", json::to_json(census.expected_uniform)}};
    return rep;
}

inline Report task_count(const Scenario& s, const Flags&) {
    if (!s.task.contains("frequencies")) throw ValidationError("count needs 'frequencies'");
    const auto freq = s.task.at("frequencies").get<counting::FrequencyVector>();
    Report rep;
    const BigInt count = counting::count_realizations(freq);
    const double gap = counting::log_count_entropy_gap(freq);
    const double env = counting::gap_envelope(freq);
    rep.note("count", count.str());
    rep.note("gap", fmt(gap));
    rep.note("envelope", fmt(env));
    rep.data = {{"count", count.str()}, {"gap", json::number(gap)}, {"envelope", json::number(env)}};
    return rep;
}

inline igci::MonotoneFunction parse_function(const Json& spec) {
    if (spec.is_string()) return igci::MonotoneFunction::builtin(spec.get<std::string>());
    if (spec.is_object() && spec.contains("knots")) {
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : spec.at("knots")) knots.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
        return igci::MonotoneFunction::piecewise_linear(std::move(knots));
    }
    throw ValidationError("function must be a built-in name or {\"knots\": [[x, y], ...]}");
}

inline std::vector<double> x_samples(const Json& spec) {
    if (spec.is_object() && spec.contains("uniform_grid")) {
        const double lo = spec.value("from", 0.0);
        const double hi = spec.value("to", 1.0);
        return igci::uniform_grid(spec.at("uniform_grid").get<std::size_t>(), lo, hi);
    }
    if (spec.is_array() && !spec.empty()) return spec.get<std::vector<double>>();
    throw ValidationError("igci samples must be a list of reals or {\"uniform_grid\": n}");
}

inline Report task_igci(const Scenario& s, const Flags& flags) {
    const auto f = parse_function(s.task.value("function", Json("square")));
    f.validate();
    const auto xs = x_samples(s.samples);
    for (double x : xs)
        if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("igci samples must lie in [0, 1]");
    const std::size_t l = flags.grid.value_or(s.task.value("grid", std::size_t{256}));
    const double w = flags.pen_width.value_or(s.task.value("pen_width", igci::kDefaultPenWidth));
    const auto score = igci::igci_score(f, xs);
    const auto pen = igci::fat_pen(f, l, w);
    const auto discrete = igci::discrete_pir_score(pen, igci::snap_samples(f, xs, l));
    std::vector<double> limit_xs = xs;
    if (s.task.contains("limit_samples")) limit_xs = x_samples(s.task.at("limit_samples"));
    const auto limit = igci::limit_consistency(f, limit_xs);
    Report rep;
    rep.note("function", f.name());
    rep.note("samples", std::to_string(xs.size()));
    rep.note("igci score", fmt(score.score));
    rep.note("igci verdict", pir::to_string(score.verdict));
    rep.note("inverse score", fmt(score.inverse_score));
    rep.note("grid", std::to_string(l));
    rep.note("pen width", fmt(w));
    rep.note("relation size", std::to_string(pen.relation.size()));
    rep.note("sum log N_X", fmt(discrete.sum_log_nx));
    rep.note("sum log N_Y", fmt(discrete.sum_log_ny));
    rep.note("discrete verdict", pir::to_string(discrete.verdict));
    Json steps = Json::array();
    for (const auto& st : limit.steps) {
        rep.note("deviation at l=" + std::to_string(st.grid), fmt(st.deviation));
        steps.push_back({{"grid", st.grid}, {"width", json::number(st.width)}, {"deviation", json::number(st.deviation)}});
    }
    rep.note("deviation decreasing", limit.decreasing ? "yes" : "no");
    rep.data = {{"function", f.name()},
                {"samples", xs.size()},
                {"score", json::number(score.score)},
                {"inverse_score", json::number(score.inverse_score)},
                {"verdict", pir::to_string(score.verdict)},
                {"fat_pen",
                 {{"grid", l},
                  {"width", json::number(w)},
                  {"relation_size", pen.relation.size()},
                  {"sum_log_nx", json::number(discrete.sum_log_nx)},
                  {"sum_log_ny", json::number(discrete.sum_log_ny)},
                  {"verdict", pir::to_string(discrete.verdict)}}},
                {"limit_consistency", {{"steps", steps}, {"decreasing", limit.decreasing}, {"improved", limit.improved}}}};
    return rep;
}

}  // namespace detail

inline std::vector<std::string> task_names() {
    return {"pir",        "pir-compare",         "infer-direction", "maxent", "feasibility", "causal-maxent",
            "causal-maxent-dag", "maxent-compare", "census",         "count",  "igci"};
}

inline Report run_task(const Scenario& s, const Flags& flags = {}) {
    const std::string task = s.task.at("name").get<std::string>();
    if (task == "pir") return detail::task_pir(s, flags);
    if (task == "pir-compare") return detail::task_pir_compare(s, flags);
    if (task == "infer-direction") return detail::task_infer_direction(s, flags);
    if (task == "maxent") return detail::task_maxent(s, flags);
    if (task == "feasibility") return detail::task_feasibility(s, flags);
    if (task == "causal-maxent" || task == "causal-maxent-dag") return detail::task_causal(s, flags);
    if (task == "maxent-compare") return detail::task_maxent_compare(s, flags);
    if (task == "census") return detail::task_census(s, flags);
    if (task == "count") return detail::task_count(s, flags);
    if (task == "igci") return detail::task_igci(s, flags);
    throw ValidationError("unknown task '" + task + "'");
}

struct Outcome {
    int exit_code = exit_ok;
    std::string out;
    std::string err;
};

inline std::string error_text(ErrorCode code, const std::string& message, const std::string& format) {
    if (format == "json") {
        Json e = {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
        return e.dump(2) + "\n";
    }
    return "error[" + std::string(to_string(code)) + "]: " + message + "\n";
}

/// Loads, runs and renders one scenario; never throws.
inline Outcome run(const std::string& path, const Flags& flags) {
    Outcome o;
    auto fail = [&](ErrorCode code, const std::string& message) {
        o.exit_code = exit_code_for(code);
        (flags.format == "json" ? o.out : o.err) = error_text(code, message, flags.format);
        if (flags.format == "json") o.err = "error[" + std::string(to_string(code)) + "]: " + message + "\n";
    };
    try {
        if (flags.format != "table" && flags.format != "json" && flags.format != "csv")
            throw ValidationError("format must be table, json or csv");
        const Scenario s = load_scenario(resolve(path), flags);
        const Report r = run_task(s, flags);
        o.exit_code = r.exit_code;
        o.out = render(r, s, flags.format);
        if (r.exit_code == exit_infeasible) o.err = r.status + "\n";
    } catch (const Error& e) {
        fail(e.code(), e.what());
    } catch (const Json::exception& e) {
        fail(ErrorCode::validation, std::string("malformed scenario: ") + e.what());
    }
    return o;
}

inline std::string list_examples(const std::string& format = "table") {
    std::ostringstream out;
    if (format == "json") {
        Json arr = Json::array();
        for (const auto& f : catalog())
            arr.push_back({{"name", f.name}, {"file", (scenario_dir() / f.file).string()}, {"description", f.description}});
        return arr.dump(2) + "\n";
    }
    if (format == "csv") {
        out << "name,file,description\n";
        for (const auto& f : catalog())
            out << f.name << "," << csv_escape((scenario_dir() / f.file).string()) << "," << csv_escape(f.description) << "\n";
        return out.str();
    }
    std::size_t width = 0;
    for (const auto& f : catalog()) width = std::max(width, f.name.size());
    for (const auto& f : catalog()) out << f.name << std::string(width - f.name.size() + 2, ' ') << f.description << "\n";
    return out.str();
}

}  // namespace cpir::cli
