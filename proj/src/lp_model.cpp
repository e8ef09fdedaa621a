#include "ctlrp/lp_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ctlrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

int LinearProgram::add_variable(LpVariable v) {
    const int index = static_cast<int>(variables.size());
    if (!variable_index.emplace(v.name, index).second)
        throw LpFormatError("duplicate variable name: " + v.name);
    variables.push_back(std::move(v));
    return index;
}

int LinearProgram::find_variable(const std::string &name) const {
    auto it = variable_index.find(name);
    return it == variable_index.end() ? -1 : it->second;
}

void write_lp(std::ostream &out, const LinearProgram &lp) {
    out << "Minimize\n obj:";
    bool first = true;
    for (const auto &t : lp.objective) {
        const double c = t.coef;
        if (c == 0.0) continue;
        if (first) {
            out << ' ' << format_number(c);
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ") << format_number(std::abs(c));
        }
        out << ' ' << lp.variables[static_cast<std::size_t>(t.var)].name;
    }
    if (first) out << " 0 " << (lp.variables.empty() ? "none" : lp.variables.front().name);
    out << "\nSubject To\n";
    for (const auto &row : lp.rows) {
        out << ' ' << row.name << ':';
        bool lead = true;
        for (const auto &t : row.terms) {
            if (lead) {
                out << ' ' << format_number(t.coef);
                lead = false;
            } else {
                out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef));
            }
            out << ' ' << lp.variables[static_cast<std::size_t>(t.var)].name;
        }
        if (lead) out << " 0 " << lp.variables.front().name;
        switch (row.sense) {
        case RowSense::le: out << " <= "; break;
        case RowSense::ge: out << " >= "; break;
        case RowSense::eq: out << " = "; break;
        }
        out << format_number(row.rhs) << '\n';
    }
    // Bounds and binaries are listed in name order so the rendering does not
    // depend on variable registration order.
    std::vector<const LpVariable *> ordered;
    for (const auto &v : lp.variables) ordered.push_back(&v);
    std::sort(ordered.begin(), ordered.end(),
              [](const LpVariable *a, const LpVariable *b) { return a->name < b->name; });
    std::string bounds;
    for (const auto *v : ordered) {
        const bool default_bounds = v->lower == 0.0 && v->upper == kInf;
        const bool binary_bounds = v->binary && v->lower == 0.0 && v->upper == 1.0;
        if (default_bounds || binary_bounds) continue;
        bounds += ' ';
        if (v->upper == kInf)
            bounds += v->name + " >= " + format_number(v->lower);
        else
            bounds += format_number(v->lower) + " <= " + v->name + " <= " + format_number(v->upper);
        bounds += '\n';
    }
    if (!bounds.empty()) out << "Bounds\n" << bounds;
    bool any_binary = false;
    for (const auto &v : lp.variables) any_binary = any_binary || v.binary;
    if (any_binary) {
        out << "Binaries\n";
        for (const auto *v : ordered)
            if (v->binary) out << ' ' << v->name << '\n';
    }
    out << "End\n";
}

void export_lp(const LinearProgram &lp, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw LpFormatError("cannot write LP file: " + path);
    write_lp(out, lp);
}

namespace {

struct Token {
    enum Kind { word, number, sign, relation, colon, end } kind = end;
    std::string text;
    double value = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::istream &in) {
        std::string line;
        while (std::getline(in, line)) {
            const auto comment = line.find('\\');
            if (comment != std::string::npos) line.resize(comment);
            text_ += line;
            text_ += '\n';
        }
    }

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) return {};
        const char c = text_[pos_];
        if (c == ':') {
            ++pos_;
            return {Token::colon, ":", 0.0};
        }
        if (c == '+' || c == '-') {
            ++pos_;
            return {Token::sign, std::string(1, c), 0.0};
        }
        if (c == '<' || c == '>' || c == '=') {
            std::string rel(1, c);
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '=' || text_[pos_] == '<' || text_[pos_] == '>'))
                rel += text_[pos_++];
            return {Token::relation, rel, 0.0};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return {Token::number, "", v};
        }
        std::string word;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != ':' && text_[pos_] != '+' && text_[pos_] != '-' && text_[pos_] != '<' &&
               text_[pos_] != '>' && text_[pos_] != '=')
            word += text_[pos_++];
        return {Token::word, word, 0.0};
    }

private:
    std::string text_;
    std::size_t pos_ = 0;
};

std::string lower(std::string s) {
    for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

RowSense sense_from(const std::string &rel) {
    if (rel == "<=" || rel == "=<" || rel == "<") return RowSense::le;
    if (rel == ">=" || rel == "=>" || rel == ">") return RowSense::ge;
    if (rel == "=") return RowSense::eq;
    throw LpFormatError("unknown relation: " + rel);
}

} // namespace

LinearProgram parse_lp(std::istream &in) {
    Lexer lexer(in);
    LinearProgram lp;

    auto ensure_var = [&](const std::string &name) {
        int idx = lp.find_variable(name);
        if (idx < 0) idx = lp.add_variable(LpVariable{name, 0.0, kInf, false});
        return idx;
    };

    enum class Section { objective, rows, bounds, binaries, done };
    Token tok = lexer.next();
    if (tok.kind != Token::word) throw LpFormatError("LP file must start with an objective section");
    {
        const std::string head = lower(tok.text);
        if (head != "minimize" && head != "min" && head != "minimise")
            throw LpFormatError("only minimization LPs are supported");
    }
    tok = lexer.next();

    Section section = Section::objective;
    std::string pending_name;
    std::vector<LinTerm> *terms = &lp.objective;
    LpRow current;
    bool row_open = false;

    auto is_section_word = [&](const std::string &w, Section &next_section) {
        const std::string s = lower(w);
        if (s == "subject") return false; // handled with "to"
        if (s == "st" || s == "s.t." || s == "such") {
            next_section = Section::rows;
            return true;
        }
        if (s == "bounds" || s == "bound") {
            next_section = Section::bounds;
            return true;
        }
        if (s == "binaries" || s == "binary" || s == "bin") {
            next_section = Section::binaries;
            return true;
        }
        if (s == "end") {
            next_section = Section::done;
            return true;
        }
        return false;
    };

    auto flush_row = [&] {
        if (row_open) throw LpFormatError("constraint " + current.name + " has no relation");
    };

    while (tok.kind != Token::end && section != Section::done) {
        if (tok.kind == Token::word) {
            const std::string w = lower(tok.text);
            if (w == "subject") {
                Token to = lexer.next();
                if (to.kind != Token::word || lower(to.text) != "to")
                    throw LpFormatError("expected 'Subject To'");
                flush_row();
                section = Section::rows;
                tok = lexer.next();
                continue;
            }
            Section next_section;
            if (is_section_word(tok.text, next_section)) {
                flush_row();
                section = next_section;
                tok = lexer.next();
                continue;
            }
        }

        switch (section) {
        case Section::objective:
        case Section::rows: {
            if (tok.kind == Token::word) {
                // Either "name:" introducing a row or a bare variable.
                pending_name = tok.text;
                tok = lexer.next();
                if (tok.kind == Token::colon) {
                    if (section == Section::rows) {
                        flush_row();
                        current = LpRow{};
                        current.name = pending_name;
                        terms = &current.terms;
                        row_open = true;
                    }
                    // Objective label is discarded ("obj:" is canonical).
                    tok = lexer.next();
                    continue;
                }
                terms->push_back({ensure_var(pending_name), 1.0});
                continue;
            }
            if (tok.kind == Token::sign || tok.kind == Token::number) {
                double sign = 1.0;
                while (tok.kind == Token::sign) {
                    if (tok.text == "-") sign = -sign;
                    tok = lexer.next();
                }
                double coef = 1.0;
                if (tok.kind == Token::number) {
                    coef = tok.value;
                    tok = lexer.next();
                }
                if (tok.kind == Token::word) {
                    Section ignored;
                    if (is_section_word(tok.text, ignored))
                        throw LpFormatError("dangling coefficient before section " + tok.text);
                    terms->push_back({ensure_var(tok.text), sign * coef});
                    tok = lexer.next();
                    continue;
                }
                throw LpFormatError("numeric literal without a variable in expression");
            }
            if (tok.kind == Token::relation) {
                if (section != Section::rows || !row_open)
                    throw LpFormatError("relation outside of a constraint");
                current.sense = sense_from(tok.text);
                tok = lexer.next();
                double sign = 1.0;
                while (tok.kind == Token::sign) {
                    if (tok.text == "-") sign = -sign;
                    tok = lexer.next();
                }
                if (tok.kind != Token::number) throw LpFormatError("constraint rhs must be numeric");
                current.rhs = sign * tok.value;
                lp.rows.push_back(current);
                row_open = false;
                terms = nullptr;
                tok = lexer.next();
                continue;
            }
            throw LpFormatError("unexpected token in expression");
        }
        case Section::bounds: {
            // Forms: "l <= x <= u", "x <= u", "x >= l", "x = v", "x free".
            double first_number = 0.0;
            bool have_first_number = false;
            if (tok.kind == Token::sign || tok.kind == Token::number) {
                double sign = 1.0;
                while (tok.kind == Token::sign) {
                    if (tok.text == "-") sign = -sign;
                    tok = lexer.next();
                }
                if (tok.kind != Token::number) throw LpFormatError("malformed bound");
                first_number = sign * tok.value;
                have_first_number = true;
                tok = lexer.next();
                if (tok.kind != Token::relation) throw LpFormatError("malformed bound");
                tok = lexer.next();
            }
            if (tok.kind != Token::word) throw LpFormatError("bound without variable");
            const int var = ensure_var(tok.text);
            tok = lexer.next();
            if (have_first_number) lp.variables[static_cast<std::size_t>(var)].lower = first_number;
            if (tok.kind == Token::word && lower(tok.text) == "free") {
                lp.variables[static_cast<std::size_t>(var)].lower = -kInf;
                lp.variables[static_cast<std::size_t>(var)].upper = kInf;
                tok = lexer.next();
                continue;
            }
            if (tok.kind == Token::relation) {
                const RowSense sense = sense_from(tok.text);
                tok = lexer.next();
                double sign = 1.0;
                while (tok.kind == Token::sign) {
                    if (tok.text == "-") sign = -sign;
                    tok = lexer.next();
                }
                if (tok.kind != Token::number) throw LpFormatError("bound rhs must be numeric");
                const double value = sign * tok.value;
                auto &v = lp.variables[static_cast<std::size_t>(var)];
                if (sense == RowSense::le)
                    v.upper = value;
                else if (sense == RowSense::ge)
                    v.lower = value;
                else {
                    v.lower = value;
                    v.upper = value;
                }
                tok = lexer.next();
            }
            continue;
        }
        case Section::binaries: {
            if (tok.kind != Token::word) throw LpFormatError("binary section expects variable names");
            auto &v = lp.variables[static_cast<std::size_t>(ensure_var(tok.text))];
            v.binary = true;
            v.lower = 0.0;
            v.upper = 1.0;
            tok = lexer.next();
            continue;
        }
        case Section::done: break;
        }
    }
    return lp;
}

LinearProgram load_lp(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw LpFormatError("cannot open LP file: " + path);
    return parse_lp(in);
}

std::vector<LpRowViolation> check_solution(const LinearProgram &lp, const std::vector<double> &values,
                                           double tolerance) {
    if (values.size() != lp.variables.size())
        throw LpFormatError("assignment size does not match variable count");
    std::vector<LpRowViolation> out;
    for (std::size_t v = 0; v < lp.variables.size(); ++v) {
        const auto &var = lp.variables[v];
        if (values[v] < var.lower - tolerance || values[v] > var.upper + tolerance)
            out.push_back({-1, "bound:" + var.name, values[v], var.lower});
    }
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        const auto &row = lp.rows[r];
        double lhs = 0.0;
        for (const auto &t : row.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
        bool violated = false;
        switch (row.sense) {
        case RowSense::le: violated = lhs > row.rhs + tolerance; break;
        case RowSense::ge: violated = lhs < row.rhs - tolerance; break;
        case RowSense::eq: violated = std::abs(lhs - row.rhs) > tolerance; break;
        }
        if (violated) out.push_back({static_cast<int>(r), row.name, lhs, row.rhs});
    }
    return out;
}

int LpModel::xi_var(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = edge_index.find({u, v});
    if (it == edge_index.end()) return -1;
    return it->second; // xi vars occupy the first |E| slots
}

int LpModel::flow_var(int from, int to) const {
    int u = from, v = to;
    const bool forward = u < v;
    if (!forward) std::swap(u, v);
    auto it = edge_index.find({u, v});
    if (it == edge_index.end()) return -1;
    const int base = static_cast<int>(edges.size()) + 2 * it->second;
    return forward ? base : base + 1;
}

int LpModel::y_var(int d) const { return 3 * static_cast<int>(edges.size()) + d; }

int LpModel::z_var(int f) const { return 3 * static_cast<int>(edges.size()) + num_depots + f; }

int LpModel::tau_var(int f, int c) const {
    const std::string name = "tau_" + std::to_string(facility_node(f)) + "_" + std::to_string(c + 1);
    return program.find_variable(name);
}

LpModel build_model(const Instance &inst, bool with_valid_inequalities) {
    LpModel model;
    model.num_depots = inst.num_depots();
    model.num_facilities = inst.num_facilities();
    model.num_customers = inst.num_customers();
    model.vehicle_capacity = inst.vehicle_capacity();
    model.vehicle_count = inst.vehicle_count();

    auto edge_cost = [&](int u, int v) {
        // Map formulation nodes back to instance nodes; copies share their
        // depot's costs.
        auto to_instance_node = [&](int node) {
            if (node <= model.num_depots) return inst.depot_node(node - 1);
            if (model.is_facility_node(node)) return inst.facility_node(node - model.num_depots - 1);
            return inst.depot_node(node - model.num_depots - model.num_facilities - 1);
        };
        return inst.node_cost(to_instance_node(u), to_instance_node(v));
    };

    for (int d = 0; d < model.num_depots; ++d)
        for (int f = 0; f < model.num_facilities; ++f)
            model.edges.emplace_back(model.depot_node(d), model.facility_node(f));
    for (int f = 0; f < model.num_facilities; ++f)
        for (int g = f + 1; g < model.num_facilities; ++g)
            model.edges.emplace_back(model.facility_node(f), model.facility_node(g));
    for (int f = 0; f < model.num_facilities; ++f)
        for (int d = 0; d < model.num_depots; ++d)
            model.edges.emplace_back(model.facility_node(f), model.copy_node(d));
    for (std::size_t e = 0; e < model.edges.size(); ++e)
        model.edge_index[model.edges[e]] = static_cast<int>(e);

    LinearProgram &lp = model.program;
    for (const auto &[u, v] : model.edges)
        lp.add_variable({"xi_" + std::to_string(u) + "_" + std::to_string(v), 0.0, 1.0, true});
    for (const auto &[u, v] : model.edges) {
        lp.add_variable({"x_" + std::to_string(u) + "_" + std::to_string(v), 0.0, kInf, false});
        lp.add_variable({"x_" + std::to_string(v) + "_" + std::to_string(u), 0.0, kInf, false});
    }
    for (int d = 0; d < model.num_depots; ++d)
        lp.add_variable({"y_" + std::to_string(model.depot_node(d)), 0.0, 1.0, true});
    for (int f = 0; f < model.num_facilities; ++f)
        lp.add_variable({"z_" + std::to_string(model.facility_node(f)), 0.0, 1.0, true});
    for (int f = 0; f < model.num_facilities; ++f)
        for (int c = 0; c < model.num_customers; ++c) {
            const auto &cov = inst.customer(c).coverage;
            if (std::binary_search(cov.begin(), cov.end(), f))
                lp.add_variable({"tau_" + std::to_string(model.facility_node(f)) + "_" +
                                     std::to_string(c + 1),
                                 0.0, 1.0, true});
        }

    for (std::size_t e = 0; e < model.edges.size(); ++e)
        lp.objective.push_back({static_cast<int>(e), edge_cost(model.edges[e].first, model.edges[e].second)});
    for (int d = 0; d < model.num_depots; ++d)
        lp.objective.push_back({model.y_var(d), inst.depot(d).selection_cost});

    const double q_total = static_cast<double>(inst.total_demand());
    const double mq = static_cast<double>(model.vehicle_count) * model.vehicle_capacity;

    // (2) facility flow balance against covered demand.
    for (int f = 0; f < model.num_facilities; ++f) {
        LpRow row;
        row.name = "c2_" + std::to_string(model.facility_node(f));
        row.tag = "2";
        const int node = model.facility_node(f);
        for (const auto &[u, v] : model.edges) {
            if (u != node && v != node) continue;
            const int other = u == node ? v : u;
            row.terms.push_back({model.flow_var(other, node), 1.0});
            row.terms.push_back({model.flow_var(node, other), -1.0});
        }
        for (int c = 0; c < model.num_customers; ++c) {
            const int tau = model.tau_var(f, c);
            if (tau >= 0)
                row.terms.push_back({tau, -2.0 * static_cast<double>(inst.customer(c).demand)});
        }
        row.sense = RowSense::eq;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    // (3)-(5) fleet flow totals.
    {
        LpRow row3{"c3", {}, RowSense::eq, q_total, "3"};
        LpRow row4{"c4", {}, RowSense::eq, mq - q_total, "4"};
        LpRow row5{"c5", {}, RowSense::eq, mq, "5"};
        for (int d = 0; d < model.num_depots; ++d)
            for (int f = 0; f < model.num_facilities; ++f) {
                row3.terms.push_back({model.flow_var(model.depot_node(d), model.facility_node(f)), 1.0});
                row4.terms.push_back({model.flow_var(model.facility_node(f), model.depot_node(d)), 1.0});
                row5.terms.push_back({model.flow_var(model.copy_node(d), model.facility_node(f)), 1.0});
            }
        lp.rows.push_back(std::move(row3));
        lp.rows.push_back(std::move(row4));
        lp.rows.push_back(std::move(row5));
    }
    // (6)-(7) depot edge coupling.
    for (int d = 0; d < model.num_depots; ++d)
        for (int f = 0; f < model.num_facilities; ++f) {
            LpRow row6;
            row6.name = "c6_" + std::to_string(model.depot_node(d)) + "_" +
                        std::to_string(model.facility_node(f));
            row6.tag = "6";
            row6.terms.push_back({model.xi_var(model.depot_node(d), model.facility_node(f)), 1.0});
            row6.terms.push_back({model.y_var(d), -1.0});
            row6.sense = RowSense::le;
            row6.rhs = 0.0;
            lp.rows.push_back(std::move(row6));

            LpRow row7;
            row7.name = "c7_" + std::to_string(model.copy_node(d)) + "_" +
                        std::to_string(model.facility_node(f));
            row7.tag = "7";
            row7.terms.push_back({model.xi_var(model.facility_node(f), model.copy_node(d)), 1.0});
            row7.terms.push_back({model.y_var(d), -1.0});
            row7.sense = RowSense::le;
            row7.rhs = 0.0;
            lp.rows.push_back(std::move(row7));
        }
    // (8) flow / edge coupling.
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const auto &[u, v] = model.edges[e];
        LpRow row;
        row.name = "c8_" + std::to_string(u) + "_" + std::to_string(v);
        row.tag = "8";
        row.terms.push_back({model.flow_var(u, v), 1.0});
        row.terms.push_back({model.flow_var(v, u), 1.0});
        row.terms.push_back({static_cast<int>(e), -model.vehicle_capacity});
        row.sense = RowSense::eq;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    // (9) facility degree.
    for (int f = 0; f < model.num_facilities; ++f) {
        LpRow row;
        row.name = "c9_" + std::to_string(model.facility_node(f));
        row.tag = "9";
        const int node = model.facility_node(f);
        for (const auto &[u, v] : model.edges)
            if (u == node || v == node) row.terms.push_back({model.xi_var(u, v), 1.0});
        row.terms.push_back({model.z_var(f), -2.0});
        row.sense = RowSense::eq;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    // (10) unique covering.
    for (int c = 0; c < model.num_customers; ++c) {
        LpRow row;
        row.name = "c10_" + std::to_string(c + 1);
        row.tag = "10";
        for (int f : inst.customer(c).coverage) row.terms.push_back({model.tau_var(f, c), 1.0});
        row.sense = RowSense::eq;
        row.rhs = 1.0;
        lp.rows.push_back(std::move(row));
    }
    // (11) covering only at selected facilities.
    for (int c = 0; c < model.num_customers; ++c)
        for (int f : inst.customer(c).coverage) {
            LpRow row;
            row.name = "c11_" + std::to_string(model.facility_node(f)) + "_" + std::to_string(c + 1);
            row.tag = "11";
            row.terms.push_back({model.tau_var(f, c), 1.0});
            row.terms.push_back({model.z_var(f), -1.0});
            row.sense = RowSense::le;
            row.rhs = 0.0;
            lp.rows.push_back(std::move(row));
        }
    // (12) selected facilities cover somebody.
    for (int f = 0; f < model.num_facilities; ++f) {
        LpRow row;
        row.name = "c12_" + std::to_string(model.facility_node(f));
        row.tag = "12";
        row.terms.push_back({model.z_var(f), 1.0});
        for (int c = 0; c < model.num_customers; ++c) {
            const int tau = model.tau_var(f, c);
            if (tau >= 0) row.terms.push_back({tau, -1.0});
        }
        row.sense = RowSense::le;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    // (13) facility capacity.
    for (int f = 0; f < model.num_facilities; ++f) {
        LpRow row;
        row.name = "c13_" + std::to_string(model.facility_node(f));
        row.tag = "13";
        for (int c = 0; c < model.num_customers; ++c) {
            const int tau = model.tau_var(f, c);
            if (tau >= 0) row.terms.push_back({tau, static_cast<double>(inst.customer(c).demand)});
        }
        if (row.terms.empty()) continue;
        row.sense = RowSense::le;
        row.rhs = inst.facility(f).capacity;
        lp.rows.push_back(std::move(row));
    }
    // (14) depot capacity on outgoing load.
    for (int d = 0; d < model.num_depots; ++d) {
        LpRow row;
        row.name = "c14_" + std::to_string(model.depot_node(d));
        row.tag = "14";
        for (int f = 0; f < model.num_facilities; ++f)
            row.terms.push_back({model.flow_var(model.depot_node(d), model.facility_node(f)), 1.0});
        row.terms.push_back({model.y_var(d), -inst.depot(d).capacity});
        row.sense = RowSense::le;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    if (with_valid_inequalities) {
        // (15) vehicles return empty.
        for (int f = 0; f < model.num_facilities; ++f)
            for (int d = 0; d < model.num_depots; ++d) {
                LpRow row;
                row.name = "c15_" + std::to_string(model.facility_node(f)) + "_" +
                           std::to_string(model.copy_node(d));
                row.tag = "15";
                row.terms.push_back({model.flow_var(model.facility_node(f), model.copy_node(d)), 1.0});
                row.sense = RowSense::eq;
                row.rhs = 0.0;
                lp.rows.push_back(std::move(row));
            }
        // (16) matching edge counts at a depot and its copy.
        for (int d = 0; d < model.num_depots; ++d) {
            LpRow row;
            row.name = "c16_" + std::to_string(model.depot_node(d));
            row.tag = "16";
            for (int f = 0; f < model.num_facilities; ++f) {
                row.terms.push_back({model.xi_var(model.depot_node(d), model.facility_node(f)), 1.0});
                row.terms.push_back({model.xi_var(model.facility_node(f), model.copy_node(d)), -1.0});
            }
            row.sense = RowSense::eq;
            row.rhs = 0.0;
            lp.rows.push_back(std::move(row));
        }
        // (17) flow plus residual at a depot equals the copy's outflow.
        for (int d = 0; d < model.num_depots; ++d) {
            LpRow row;
            row.name = "c17_" + std::to_string(model.depot_node(d));
            row.tag = "17";
            for (int f = 0; f < model.num_facilities; ++f) {
                row.terms.push_back({model.flow_var(model.depot_node(d), model.facility_node(f)), 1.0});
                row.terms.push_back({model.flow_var(model.facility_node(f), model.depot_node(d)), 1.0});
                row.terms.push_back({model.flow_var(model.copy_node(d), model.facility_node(f)), -1.0});
            }
            row.sense = RowSense::eq;
            row.rhs = 0.0;
            lp.rows.push_back(std::move(row));
        }
    }
    return model;
}

std::vector<double> encode_solution(const LpModel &model, const Instance &inst, const Solution &sol) {
    std::vector<double> values(model.program.variables.size(), 0.0);
    auto set = [&](int var, double v) { values[static_cast<std::size_t>(var)] = v; };

    const LoadTable loads = LoadTable::build(inst, sol);
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const Route &route = sol.routes[r];
        if (route.stops.empty()) continue;
        const int d = route.depot;
        double carried = static_cast<double>(loads.route[r]);
        int prev = model.depot_node(d);
        for (int f : route.stops) {
            const int node = model.facility_node(f);
            set(model.xi_var(prev, node), 1.0);
            set(model.flow_var(prev, node), carried);
            set(model.flow_var(node, prev), model.vehicle_capacity - carried);
            carried -= static_cast<double>(loads.facility[static_cast<std::size_t>(f)]);
            prev = node;
        }
        const int terminal = model.copy_node(d);
        set(model.xi_var(prev, terminal), 1.0);
        set(model.flow_var(prev, terminal), carried); // zero for exact covers
        set(model.flow_var(terminal, prev), model.vehicle_capacity - carried);
        set(model.y_var(d), 1.0);
        for (int f : route.stops) set(model.z_var(f), 1.0);
    }
    for (int c = 0; c < inst.num_customers(); ++c) {
        const int f = sol.assignment[static_cast<std::size_t>(c)];
        const int tau = model.tau_var(f, c);
        if (tau >= 0) set(tau, 1.0);
    }
    return values;
}

std::vector<PathCut> separate_elementary(const LpModel &model, const std::vector<double> &values) {
    if (values.size() != model.program.variables.size())
        throw RouteDecodeError("assignment size does not match variable count");

    // Adjacency over selected edges.
    const int max_node = 2 * model.num_depots + model.num_facilities;
    std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(max_node) + 1);
    std::vector<bool> edge_used(model.edges.size(), false);
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        if (values[e] > 0.5) {
            adjacent[static_cast<std::size_t>(model.edges[e].first)].push_back(static_cast<int>(e));
            adjacent[static_cast<std::size_t>(model.edges[e].second)].push_back(static_cast<int>(e));
        }
    }
    for (int f = 0; f < model.num_facilities; ++f) {
        const auto degree = adjacent[static_cast<std::size_t>(model.facility_node(f))].size();
        if (degree != 0 && degree != 2)
            throw RouteDecodeError("facility node " + std::to_string(model.facility_node(f)) +
                                   " has degree " + std::to_string(degree));
    }

    std::vector<PathCut> cuts;
    for (int d = 0; d < model.num_depots; ++d) {
        const int start = model.depot_node(d);
        for (int e : adjacent[static_cast<std::size_t>(start)]) {
            if (edge_used[static_cast<std::size_t>(e)]) continue;
            edge_used[static_cast<std::size_t>(e)] = true;
            int prev = start;
            int node = model.edges[static_cast<std::size_t>(e)].first == start
                           ? model.edges[static_cast<std::size_t>(e)].second
                           : model.edges[static_cast<std::size_t>(e)].first;
            std::vector<int> stops;
            while (model.is_facility_node(node)) {
                stops.push_back(node);
                if (static_cast<int>(stops.size()) > model.num_facilities)
                    throw RouteDecodeError("route walk revisits facilities");
                int next_edge = -1;
                for (int cand : adjacent[static_cast<std::size_t>(node)])
                    if (!edge_used[static_cast<std::size_t>(cand)]) next_edge = cand;
                if (next_edge < 0)
                    throw RouteDecodeError("route walk dead-ends at node " + std::to_string(node));
                edge_used[static_cast<std::size_t>(next_edge)] = true;
                prev = node;
                node = model.edges[static_cast<std::size_t>(next_edge)].first == node
                           ? model.edges[static_cast<std::size_t>(next_edge)].second
                           : model.edges[static_cast<std::size_t>(next_edge)].first;
            }
            (void)prev;
            if (node <= model.num_depots)
                throw RouteDecodeError("route returned to a real depot node");
            if (stops.empty()) throw RouteDecodeError("depot-to-copy edge without facilities");
            if (node == model.rho(start)) continue; // returns home, no cut
            PathCut cut;
            cut.facility_nodes = stops;
            cut.first_node = stops.front();
            cut.last_node = stops.back();
            cut.x_prime = {start};
            for (int other = 0; other < model.num_depots; ++other)
                if (model.copy_node(other) != model.rho(start)) cut.x_star.push_back(model.copy_node(other));
            cuts.push_back(std::move(cut));
        }
    }
    for (std::size_t e = 0; e < model.edges.size(); ++e)
        if (values[e] > 0.5 && !edge_used[e])
            throw RouteDecodeError("selected edges contain a depot-free cycle");
    return cuts;
}

namespace {

void accumulate(std::map<int, double> &coefs, int var, double coef) {
    if (var >= 0) coefs[var] += coef;
}

// xi({i}:X) terms with the given multiplier.
void add_depot_incidence(const LpModel &model, std::map<int, double> &coefs, int facility_node,
                         const std::vector<int> &depot_set, double multiplier) {
    for (int node : depot_set) {
        if (node <= model.num_depots)
            accumulate(coefs, model.xi_var(node, facility_node), multiplier);
        else
            accumulate(coefs, model.xi_var(facility_node, node), multiplier);
    }
}

} // namespace

LpRow cut_to_row(const LpModel &model, const PathCut &cut, const std::string &name) {
    std::map<int, double> coefs;
    std::vector<bool> in_set(static_cast<std::size_t>(2 * model.num_depots + model.num_facilities) + 1,
                             false);
    for (int node : cut.facility_nodes) in_set[static_cast<std::size_t>(node)] = true;
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const auto &[u, v] = model.edges[e];
        if (in_set[static_cast<std::size_t>(u)] != in_set[static_cast<std::size_t>(v)])
            accumulate(coefs, static_cast<int>(e), 1.0);
    }
    add_depot_incidence(model, coefs, cut.first_node, cut.x_prime, -2.0);
    add_depot_incidence(model, coefs, cut.last_node, cut.x_star, -2.0);

    LpRow row;
    row.name = name;
    row.tag = "22";
    for (const auto &[var, coef] : coefs)
        if (coef != 0.0) row.terms.push_back({var, coef});
    row.sense = RowSense::ge;
    row.rhs = 0.0;
    return row;
}

std::pair<double, double> cut_values(const LpModel &model, const PathCut &cut,
                                     const std::vector<double> &values) {
    std::vector<bool> in_set(static_cast<std::size_t>(2 * model.num_depots + model.num_facilities) + 1,
                             false);
    for (int node : cut.facility_nodes) in_set[static_cast<std::size_t>(node)] = true;
    double lhs = 0.0;
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const auto &[u, v] = model.edges[e];
        if (in_set[static_cast<std::size_t>(u)] != in_set[static_cast<std::size_t>(v)]) lhs += values[e];
    }
    auto incidence = [&](int facility_node, const std::vector<int> &depot_set) {
        double sum = 0.0;
        for (int node : depot_set) {
            const int var = node <= model.num_depots ? model.xi_var(node, facility_node)
                                                     : model.xi_var(facility_node, node);
            if (var >= 0) sum += values[static_cast<std::size_t>(var)];
        }
        return sum;
    };
    const double rhs = 2.0 * (incidence(cut.first_node, cut.x_prime) + incidence(cut.last_node, cut.x_star));
    return {lhs, rhs};
}

void append_cuts(LpModel &model, const std::vector<PathCut> &cuts) {
    int counter = 0;
    for (const auto &row : model.program.rows)
        if (row.tag == "22") ++counter;
    for (const auto &cut : cuts) {
        model.program.rows.push_back(
            cut_to_row(model, cut, "cut_" + std::to_string(++counter)));
    }
}

} // namespace ctlrp
