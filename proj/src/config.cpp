#include "projlab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace projlab {

// ---------------------------------------------------------------------------
// line index: a structural scan of text that nlohmann has already accepted

namespace {

std::string escape_token(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

class Scanner {
public:
    Scanner(const std::string& text, std::map<std::string, int>& out) : s_(text), out_(out) {}

    void value(const std::string& ptr)
    {
        skip_ws();
        out_.emplace(ptr, line_);
        if (pos_ >= s_.size()) return;
        const char c = s_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            if (peek() == '}') {
                ++pos_;
                return;
            }
            while (pos_ < s_.size()) {
                skip_ws();
                const std::string key = string_token();
                skip_ws();
                ++pos_; // ':'
                value(ptr + "/" + escape_token(key));
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                ++pos_; // '}'
                return;
            }
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            if (peek() == ']') {
                ++pos_;
                return;
            }
            for (int i = 0; pos_ < s_.size(); ++i) {
                value(ptr + "/" + std::to_string(i));
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                ++pos_; // ']'
                return;
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[pos_]) == std::string_view::npos) ++pos_;
        }
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    // decodes only what JSON pointers need; \u escapes are kept verbatim
    std::string string_token()
    {
        std::string out;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                const char e = s_[pos_ + 1];
                out += (e == 'n') ? '\n' : (e == 't') ? '\t' : e;
                pos_ += 2;
                continue;
            }
            out += s_[pos_++];
        }
        ++pos_;
        return out;
    }

    const std::string& s_;
    std::map<std::string, int>& out_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace

LineIndex::LineIndex(const std::string& text)
{
    Scanner(text, lines_).value("");
}

int LineIndex::line(const std::string& ptr) const
{
    std::string p = ptr;
    while (true) {
        auto it = lines_.find(p);
        if (it != lines_.end()) return it->second;
        if (p.empty()) return 1;
        p.erase(p.rfind('/'));
    }
}

// ---------------------------------------------------------------------------
// validating cursor

namespace {

struct Context {
    std::string source;
    LineIndex lines;
};

class Node {
public:
    Node(const json& j, std::string ptr, const Context& ctx) : j_(&j), ptr_(std::move(ptr)), ctx_(&ctx) {}

    [[noreturn]] void fail(const std::string& msg) const
    {
        std::string where = ctx_->source + ":" + std::to_string(ctx_->lines.line(ptr_)) + ": ";
        if (!ptr_.empty()) where += ptr_ + ": ";
        throw Error(ErrorKind::Config, where + msg);
    }

    const json& raw() const { return *j_; }
    const std::string& ptr() const { return ptr_; }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node operator[](const std::string& key) const
    {
        if (!j_->is_object()) fail("expected an object");
        auto it = j_->find(key);
        if (it == j_->end()) fail("missing key \"" + key + "\"");
        return Node(*it, ptr_ + "/" + escape_token(key), *ctx_);
    }

    Node at(std::size_t i) const { return Node((*j_)[i], ptr_ + "/" + std::to_string(i), *ctx_); }

    std::size_t size() const
    {
        if (!j_->is_array()) fail("expected an array");
        return j_->size();
    }

    void only(const std::set<std::string>& keys) const
    {
        if (!j_->is_object()) fail("expected an object");
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!keys.count(it.key())) Node(it.value(), ptr_ + "/" + escape_token(it.key()), *ctx_).fail("unknown key");
    }

    double number() const
    {
        if (!j_->is_number()) fail("expected a number");
        const double v = j_->get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }

    long long integer() const
    {
        if (!j_->is_number_integer()) fail("expected an integer");
        return j_->get<long long>();
    }

    int integer_in(long long lo, long long hi) const
    {
        const long long v = integer();
        if (v < lo || v > hi) fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    }

    bool boolean() const
    {
        if (!j_->is_boolean()) fail("expected true or false");
        return j_->get<bool>();
    }

    std::string string() const
    {
        if (!j_->is_string()) fail("expected a string");
        return j_->get<std::string>();
    }

    Vec vec(int dim) const
    {
        const std::size_t n = size();
        if (dim >= 0 && static_cast<int>(n) != dim)
            fail("expected " + std::to_string(dim) + " coordinates, got " + std::to_string(n));
        Vec v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
        return v;
    }

    std::vector<Vec> vecs(int dim) const
    {
        std::vector<Vec> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).vec(dim));
        return out;
    }

private:
    const json* j_;
    std::string ptr_;
    const Context* ctx_;
};

Mat columns(const std::vector<Vec>& vs, int dim)
{
    Mat m(dim, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
    return m;
}

SetPtr<double> parse_set(const Node& n, int d)
{
    const std::string type = n["type"].string();
    try {
        if (type == "halfspace" || type == "hyperplane") {
            n.only({"type", "a", "b"});
            const Vec a = n["a"].vec(d);
            const double b = n["b"].number();
            return type == "halfspace" ? make_halfspace<double>(a, b) : make_hyperplane<double>(a, b);
        }
        if (type == "affine") {
            n.only({"type", "anchor", "directions"});
            const Vec anchor = n["anchor"].vec(d);
            const auto dirs = n.has("directions") ? n["directions"].vecs(d) : std::vector<Vec>{};
            return make_affine<double>(anchor, columns(dirs, d));
        }
        if (type == "ball" || type == "sphere") {
            n.only({"type", "center", "radius"});
            const Vec c = n["center"].vec(d);
            const double r = n["radius"].number();
            return type == "ball" ? make_ball<double>(c, r) : make_sphere<double>(c, r);
        }
        if (type == "box") {
            n.only({"type", "lower", "upper"});
            return make_box<double>(n["lower"].vec(d), n["upper"].vec(d));
        }
        if (type == "orthant") {
            n.only({"type", "signs"});
            const Node s = n["signs"];
            if (static_cast<int>(s.size()) != d) s.fail("expected " + std::to_string(d) + " signs");
            std::vector<int> signs;
            for (std::size_t i = 0; i < s.size(); ++i) signs.push_back(s.at(i).integer_in(-1, 1));
            return make_orthant<double>(signs);
        }
        if (type == "cone") {
            n.only({"type", "generators"});
            return make_cone<double>(columns(n["generators"].vecs(d), d));
        }
        if (type == "enlargement") {
            n.only({"type", "inner", "tau"});
            return make_enlargement<double>(parse_set(n["inner"], d), n["tau"].number());
        }
        if (type == "union") {
            n.only({"type", "members"});
            const Node m = n["members"];
            std::vector<SetPtr<double>> members;
            for (std::size_t i = 0; i < m.size(); ++i) members.push_back(parse_set(m.at(i), d));
            return make_union<double>(std::move(members));
        }
        if (type == "points") {
            n.only({"type", "points"});
            return make_points<double>(n["points"].vecs(d));
        }
        if (type == "translate") {
            n.only({"type", "inner", "shift"});
            return make_translate<double>(parse_set(n["inner"], d), n["shift"].vec(d));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        n.fail(e.what());
    }
    n["type"].fail("unknown set type \"" + type + "\"");
}

// ---------------------------------------------------------------------------
// analyses: field tables with defaults, then per-kind semantic checks

enum class F { Bool, Count, Index, Positive, Number, Unit, String, SetIndex, OpIndex, SetList, NumberList, NumberOrEstimate };

struct Field {
    const char* key;
    F type;
    std::optional<json> def;
    bool required = false;
};

Field req(const char* key, F t) { return {key, t, std::nullopt, true}; }
Field opt(const char* key, F t) { return {key, t, std::nullopt, false}; }
Field def(const char* key, F t, json v) { return {key, t, std::move(v), false}; }

struct Scope {
    const ScenarioConfig& cfg;
};

json read_field(const Node& n, F t, const Scope& sc)
{
    const int nsets = static_cast<int>(sc.cfg.sets.size());
    const int nops = static_cast<int>(sc.cfg.operators.size());
    switch (t) {
    case F::Bool: return n.boolean();
    case F::Count: return n.integer_in(1, 10'000'000);
    case F::Index: return n.integer_in(0, 1 << 20);
    case F::Positive: {
        const double v = n.number();
        if (v <= 0.0) n.fail("must be positive");
        return v;
    }
    case F::Number: return n.number();
    case F::Unit: {
        const double v = n.number();
        if (v <= 0.0 || v > 1.0) n.fail("must lie in (0, 1]");
        return v;
    }
    case F::String: return n.string();
    case F::SetIndex:
        if (nsets == 0) n.fail("the scenario has no sets");
        return n.integer_in(0, nsets - 1);
    case F::OpIndex:
        if (nops == 0) n.fail("the scenario has no operators");
        return n.integer_in(0, nops - 1);
    case F::SetList: {
        json out = json::array();
        if (n.size() == 0) n.fail("expected at least one set index");
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(read_field(n.at(i), F::SetIndex, sc));
        return out;
    }
    case F::NumberList: {
        json out = json::array();
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(n.at(i).number());
        return out;
    }
    case F::NumberOrEstimate:
        if (n.raw().is_string()) {
            if (n.string() != "estimate") n.fail("expected a number or \"estimate\"");
            return "estimate";
        }
        return n.number();
    }
    n.fail("bad field type");
}

json read_fields(const Node& n, const std::vector<Field>& fields, const Scope& sc)
{
    std::set<std::string> keys;
    for (const auto& f : fields) keys.insert(f.key);
    n.only(keys);
    json out = json::object();
    for (const auto& f : fields) {
        if (n.has(f.key))
            out[f.key] = read_field(n[f.key], f.type, sc);
        else if (f.required)
            n.fail(std::string("missing key \"") + f.key + "\"");
        else if (f.def)
            out[f.key] = *f.def;
    }
    return out;
}

Node child_or_self(const Node& n, const char* key) { return n.has(key) ? n[key] : n; }

const std::set<std::string>& theorem_names()
{
    static const std::set<std::string> names = {"dist-qff",     "dist-qf",     "refined",      "cyclic-relaxed",
                                                "cyclic-overrelaxed", "cyclic-projections", "convex-cyclic",
                                                "semi-intrepid", "convex-semi-intrepid", "cyclic-dr"};
    return names;
}

bool all_ops(const ScenarioConfig& c, const std::string& type)
{
    if (c.operators.empty()) return false;
    for (const auto& o : c.operators)
        if (o.type != type) return false;
    return true;
}

bool all_sets_convex(const ScenarioConfig& c)
{
    for (const auto& s : c.sets)
        if (!is_convex(*s)) return false;
    return true;
}

json normalize_estimate(const Node* n, const Scope& sc)
{
    const std::vector<Field> fields = {def("eps", F::Bool, false),     def("kappa", F::Bool, false),
                                       def("theta_bar", F::Bool, false), def("samples", F::Count, 1000),
                                       def("delta", F::Positive, sc.cfg.delta)};
    if (!n) {
        json out = json::object();
        for (const auto& f : fields) out[f.key] = *f.def;
        return out;
    }
    json out = read_fields(*n, fields, sc);
    if (out["theta_bar"].get<bool>() && sc.cfg.sets.size() != 2) n->fail("theta_bar needs exactly two sets");
    if (out["kappa"].get<bool>() && sc.cfg.sets.empty()) n->fail("kappa needs at least one set");
    return out;
}

void need_estimate(const Node& n, const json& estimate, const char* which)
{
    if (!estimate[which].get<bool>())
        n.fail(std::string("uses the estimated ") + which + ", but analyses.estimate." + which + " is off");
}

std::optional<int> operator_set(const OperatorConfig& op)
{
    if (op.type == "generalized-dr") return std::nullopt;
    return op.set;
}

json normalize_check(const Node& n, const Scope& sc, const json& estimate)
{
    const std::string kind = n["kind"].string();
    const double delta = sc.cfg.delta;
    std::vector<Field> fields = {req("kind", F::String), def("name", F::String, kind)};
    auto add = [&](std::initializer_list<Field> more) { fields.insert(fields.end(), more); };
    if (kind == "quasi_firm_fejer") {
        add({req("operator", F::OpIndex), opt("refset", F::SetIndex), opt("gamma", F::Number), opt("beta", F::Number),
             opt("eps", F::NumberOrEstimate), def("samples", F::Count, 1000), def("delta", F::Positive, delta)});
    } else if (kind == "quasi_coercive") {
        add({req("operator", F::OpIndex), opt("set", F::SetIndex), opt("nu", F::Number), def("exact", F::Bool, false),
             def("samples", F::Count, 1000), def("delta", F::Positive, delta)});
    } else if (kind == "injectable") {
        add({req("set", F::SetIndex), req("tau", F::Positive), def("samples", F::Count, 1000),
             def("delta", F::Positive, delta), def("expect", F::Bool, true)});
    } else if (kind == "obtuse_cone") {
        add({req("set", F::SetIndex), def("samples", F::Count, 1000), def("expect", F::Bool, true)});
    } else if (kind == "strong_regularity") {
        add({req("sets", F::SetList), req("expect", F::Bool), def("min_zeta", F::Positive, 1e-6),
             def("samples", F::Count, 1000), def("delta", F::Positive, delta)});
    } else if (kind == "eps_regularity") {
        add({req("set", F::SetIndex), req("max", F::Number), def("samples", F::Count, 1000),
             def("delta", F::Positive, delta)});
    } else if (kind == "linear_regularity") {
        add({opt("min", F::Number), opt("max", F::Number), def("samples", F::Count, 1000),
             def("delta", F::Positive, delta)});
    } else if (kind == "theta_bar") {
        add({req("a", F::SetIndex), req("b", F::SetIndex), req("value", F::Number), def("tol", F::Positive, 1e-9),
             def("samples", F::Count, 1000)});
    } else if (kind == "affine_identities") {
        add({req("set", F::SetIndex), req("lambda", F::Positive), def("samples", F::Count, 1000)});
    } else {
        n["kind"].fail("unknown check kind \"" + kind + "\"");
    }
    json out = read_fields(n, fields, sc);

    if (kind == "quasi_firm_fejer") {
        const auto& op = sc.cfg.operators[out["operator"].get<std::size_t>()];
        if (!out.contains("refset")) {
            auto s = operator_set(op);
            if (!s) n.fail("refset is required for a generalized-dr operator");
            out["refset"] = *s;
        }
        const bool g = out.contains("gamma"), b = out.contains("beta");
        if (g != b) n.fail("give both gamma and beta, or neither");
        if (g) {
            if (out.contains("eps")) n.fail("eps is only used when gamma and beta are derived");
        } else {
            if (!out.contains("eps")) out["eps"] = "estimate";
            if (out["eps"] == "estimate") need_estimate(n, estimate, "eps");
        }
    } else if (kind == "quasi_coercive") {
        const auto& op = sc.cfg.operators[out["operator"].get<std::size_t>()];
        if (!out.contains("set")) {
            auto s = operator_set(op);
            if (!s) n.fail("set is required for a generalized-dr operator");
            out["set"] = *s;
        }
        if (!out.contains("nu")) {
            if (op.type != "relaxed") n.fail("nu is required unless the operator is relaxed");
            out["nu"] = op.lambda;
        }
    } else if (kind == "affine_identities") {
        if (out["lambda"].get<double>() > 2.0) child_or_self(n, "lambda").fail("lambda must lie in (0, 2]");
    } else if (kind == "linear_regularity") {
        if (!out.contains("min") && !out.contains("max")) n.fail("give min, max or both");
    }
    return out;
}

json normalize_certificate(const Node& n, const Scope& sc, const json& estimate)
{
    const ScenarioConfig& c = sc.cfg;
    json out = read_fields(n,
                           {req("theorem", F::String), opt("name", F::String), opt("eps", F::NumberOrEstimate),
                            def("kappa", F::NumberOrEstimate, "estimate"), opt("lambdas", F::NumberList),
                            opt("alphas", F::NumberList), opt("gammas", F::NumberList), opt("betas", F::NumberList),
                            opt("nu", F::NumberOrEstimate), opt("j", F::Index), opt("m", F::Count),
                            def("kstep", F::Bool, false), def("envelope", F::Bool, false),
                            opt("compare", F::Bool)},
                           sc);
    const std::string th = out["theorem"];
    if (!theorem_names().count(th)) n["theorem"].fail("unknown theorem \"" + th + "\"");
    if (!out.contains("name")) out["name"] = th;
    if (!out.contains("compare")) out["compare"] = c.runs();

    auto fail_unless = [&](bool ok, const std::string& msg) {
        if (!ok) n.fail(msg);
    };
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (out.contains(k)) n[k].fail(std::string("not used by ") + th);
    };

    const bool convex = th == "convex-cyclic" || th == "convex-semi-intrepid";
    const bool uses_eps = !convex && !out.contains("gammas");
    if (!uses_eps) {
        forbid({"eps"});
    } else if (!out.contains("eps")) {
        out["eps"] = all_sets_convex(c) ? json(0.0) : json("estimate");
    }
    if (out.contains("eps") && out["eps"] == "estimate") need_estimate(n, estimate, "eps");
    if (out["kappa"] == "estimate") need_estimate(n, estimate, "kappa");

    std::vector<double> lambdas, alphas;
    for (const auto& o : c.operators) {
        lambdas.push_back(o.lambda);
        alphas.push_back(o.alpha);
    }

    if (th == "cyclic-relaxed" || th == "cyclic-overrelaxed" || th == "convex-cyclic") {
        forbid({"alphas", "gammas", "betas", "nu", "j", "m"});
        if (!out.contains("lambdas")) {
            fail_unless(all_ops(c, "relaxed"), "lambdas can only be taken from a cycle of relaxed operators");
            out["lambdas"] = lambdas;
        }
    } else if (th == "cyclic-projections") {
        forbid({"lambdas", "alphas", "gammas", "betas", "nu", "j"});
        if (!out.contains("m")) {
            fail_unless(!c.operators.empty(), "m is required when the scenario has no operators");
            out["m"] = c.operators.size();
        }
    } else if (th == "semi-intrepid" || th == "convex-semi-intrepid") {
        forbid({"lambdas", "gammas", "betas", "nu", "j", "m"});
        if (!out.contains("alphas")) {
            fail_unless(all_ops(c, "semi-intrepid"), "alphas can only be taken from a cycle of semi-intrepid operators");
            out["alphas"] = alphas;
        }
    } else {
        // gamma/beta based: dist-qff, dist-qf, refined, cyclic-dr
        forbid({"lambdas", "alphas", "m"});
        const bool g = out.contains("gammas"), b = out.contains("betas");
        fail_unless(g == b, "give both gammas and betas, or neither");
        if (!g) {
            if (th == "cyclic-dr")
                fail_unless(all_ops(c, "generalized-dr"), "cyclic-dr derives its constants from generalized-dr operators");
            else
                fail_unless(all_ops(c, "relaxed"), "gammas and betas can only be derived from relaxed operators");
        }
        if (th == "refined") forbid({"nu", "j"});
        if (th == "dist-qff" || th == "dist-qf") fail_unless(out.contains("nu") && out["nu"].is_number(), "nu is required");
        if (th == "dist-qf") fail_unless(out.contains("j"), "j is required");
        if (th != "dist-qf") forbid({"j"});
        if (th == "cyclic-dr") {
            if (!out.contains("nu")) out["nu"] = "estimate";
            if (out["nu"] == "estimate") {
                need_estimate(n, estimate, "theta_bar");
                need_estimate(n, estimate, "kappa");
            }
        }
    }
    return out;
}

json normalize_analyses(const Node* n, const Scope& sc)
{
    if (n)
        n->only({"estimate", "checks", "certificates", "fit", "affine", "trajectory"});
    json out = json::object();
    std::optional<Node> est;
    if (n && n->has("estimate")) est = (*n)["estimate"];
    out["estimate"] = normalize_estimate(est ? &*est : nullptr, sc);

    out["checks"] = json::array();
    if (n && n->has("checks")) {
        const Node cs = (*n)["checks"];
        for (std::size_t i = 0; i < cs.size(); ++i) out["checks"].push_back(normalize_check(cs.at(i), sc, out["estimate"]));
    }
    out["certificates"] = json::array();
    if (n && n->has("certificates")) {
        const Node cs = (*n)["certificates"];
        for (std::size_t i = 0; i < cs.size(); ++i)
            out["certificates"].push_back(normalize_certificate(cs.at(i), sc, out["estimate"]));
    }

    out["fit"] = nullptr;
    if (n && n->has("fit") && !(*n)["fit"].raw().is_null()) {
        const Node f = (*n)["fit"];
        out["fit"] = read_fields(f, {def("tail_fraction", F::Unit, 0.5), def("slack", F::Number, 0.02)}, sc);
        if (!sc.cfg.runs()) f.fail("a rate fit needs x0 and operators");
    }

    out["affine"] = false;
    if (n && n->has("affine")) {
        const Node a = (*n)["affine"];
        out["affine"] = a.boolean();
        if (out["affine"].get<bool>() &&
            !(sc.cfg.runs() && sc.cfg.operators.size() == 1 && sc.cfg.operators[0].type == "generalized-dr"))
            a.fail("affine reduction needs x0 and a single generalized-dr operator");
    }

    out["trajectory"] = {{"fejer_trace", false}, {"distance_order", false}};
    if (n && n->has("trajectory")) {
        const Node t = (*n)["trajectory"];
        out["trajectory"] =
            read_fields(t, {def("fejer_trace", F::Bool, false), def("distance_order", F::Bool, false)}, sc);
        const bool any = out["trajectory"]["fejer_trace"].get<bool>() || out["trajectory"]["distance_order"].get<bool>();
        if (any && !sc.cfg.runs()) t.fail("trajectory checks need x0 and operators");
        if (out["trajectory"]["fejer_trace"].get<bool>() && !sc.cfg.intersection)
            t["fejer_trace"].fail("the Fejer trace needs an explicit intersection");
    }
    if (!out["certificates"].empty()) {
        for (const auto& cert : out["certificates"])
            if ((cert["kstep"].get<bool>() || cert["envelope"].get<bool>() || cert["compare"].get<bool>()) &&
                !sc.cfg.runs())
                n->fail("certificate \"" + cert["name"].get<std::string>() +
                        "\" asks for trajectory checks, but the scenario does not run");
    }
    return out;
}

json normalize_expect(const Node* n, const Scope& sc, const json& analyses)
{
    json out = json::object();
    if (!n) return out;
    n->only({"stop", "cycle", "rho_cycle", "nonconvergent", "affine"});
    if (!n->raw().empty() && !sc.cfg.runs()) n->fail("expectations need x0 and operators");
    const int d = sc.cfg.dimension;
    if (n->has("stop")) {
        const Node s = (*n)["stop"];
        const std::string v = s.string();
        if (v != "Converged" && v != "Budget" && v != "Diverged") s.fail("expected Converged, Budget or Diverged");
        out["stop"] = v;
    }
    if (n->has("cycle")) {
        const Node c = (*n)["cycle"];
        c.only({"period", "states", "start_max"});
        json cy = {{"period", c["period"].integer_in(1, 1 << 20)}};
        if (c.has("start_max")) cy["start_max"] = c["start_max"].integer_in(0, 1 << 30);
        if (c.has("states")) {
            const auto states = c["states"].vecs(d);
            if (static_cast<int>(states.size()) != cy["period"].get<int>())
                c["states"].fail("expected one state per step of the period");
            cy["states"] = json::array();
            for (const auto& s : states) cy["states"].push_back(vec_to_json(s));
        }
        out["cycle"] = cy;
    }
    if (n->has("rho_cycle")) {
        const Node r = (*n)["rho_cycle"];
        out["rho_cycle"] = read_fields(r, {req("value", F::Number), req("tol", F::Positive)}, sc);
        if (analyses["fit"].is_null()) r.fail("rho_cycle needs analyses.fit");
    }
    if (n->has("nonconvergent")) out["nonconvergent"] = (*n)["nonconvergent"].boolean();
    if (n->has("affine")) {
        const Node a = (*n)["affine"];
        out["affine"] = read_fields(a,
                                    {opt("classification", F::String), opt("gap_constant", F::Positive),
                                     opt("gap_ratio", F::Positive), opt("fixed_point_residual", F::Positive),
                                     opt("intersection_residual", F::Positive)},
                                    sc);
        if (out["affine"].contains("classification")) {
            const std::string k = out["affine"]["classification"];
            if (k != "FixedPointShadow" && k != "Intersection" && k != "Undetermined")
                a["classification"].fail("expected FixedPointShadow, Intersection or Undetermined");
        }
        if (!analyses["affine"].get<bool>()) a.fail("affine expectations need analyses.affine = true");
    }
    return out;
}

OperatorConfig parse_operator(const Node& n, int nsets)
{
    OperatorConfig op;
    op.type = n["type"].string();
    auto index = [&](const char* key) {
        if (nsets == 0) n.fail("the scenario has no sets");
        return n[key].integer_in(0, nsets - 1);
    };
    if (op.type == "relaxed") {
        n.only({"type", "set", "lambda"});
        op.set = index("set");
        op.lambda = n["lambda"].number();
        if (!(op.lambda > 0.0 && op.lambda <= 2.0)) n["lambda"].fail("lambda must lie in (0, 2]");
    } else if (op.type == "semi-intrepid") {
        n.only({"type", "set", "alpha", "tau"});
        op.set = index("set");
        op.alpha = n["alpha"].number();
        op.tau = n["tau"].number();
        if (!(op.alpha >= 0.0 && op.alpha <= 1.0)) n["alpha"].fail("alpha must lie in [0, 1]");
        if (op.tau < 0.0) n["tau"].fail("tau must be nonnegative");
    } else if (op.type == "generalized-dr") {
        n.only({"type", "a", "b", "lambda", "mu", "alpha"});
        op.a = index("a");
        op.b = index("b");
        op.lambda = n["lambda"].number();
        op.mu = n["mu"].number();
        op.alpha = n["alpha"].number();
        if (!(op.lambda > 0.0 && op.lambda <= 2.0)) n["lambda"].fail("lambda must lie in (0, 2]");
        if (!(op.mu > 0.0 && op.mu <= 2.0)) n["mu"].fail("mu must lie in (0, 2]");
        if (!(op.alpha > 0.0 && op.alpha <= 1.0)) n["alpha"].fail("alpha must lie in (0, 1]");
    } else {
        n["type"].fail("unknown operator type \"" + op.type + "\"");
    }
    return op;
}

json operator_to_json(const OperatorConfig& op)
{
    if (op.type == "relaxed") return {{"type", op.type}, {"set", op.set}, {"lambda", op.lambda}};
    if (op.type == "semi-intrepid") return {{"type", op.type}, {"set", op.set}, {"alpha", op.alpha}, {"tau", op.tau}};
    return {{"type", op.type}, {"a", op.a}, {"b", op.b}, {"lambda", op.lambda}, {"mu", op.mu}, {"alpha", op.alpha}};
}

ScenarioConfig parse_root(const Node& root)
{
    root.only({"name", "dimension", "seed", "sets", "intersection", "anchor", "delta", "operators", "x0", "budget",
               "analyses", "expect"});
    ScenarioConfig c;
    c.name = root["name"].string();
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos || c.name == "." || c.name == "..")
        root["name"].fail("name must be a plain, nonempty file name");
    c.dimension = root["dimension"].integer_in(1, kMaxDimension);
    {
        const Node s = root["seed"];
        if (!s.raw().is_number_unsigned()) s.fail("seed must be a nonnegative integer");
        c.seed = s.raw().get<std::uint64_t>();
    }
    const int d = c.dimension;

    if (root.has("sets")) {
        const Node sets = root["sets"];
        for (std::size_t i = 0; i < sets.size(); ++i) c.sets.push_back(parse_set(sets.at(i), d));
    }
    if (root.has("intersection")) {
        const Node in = root["intersection"];
        if (in.raw().is_string()) {
            if (in.string() != "oracle") in.fail("expected a set or \"oracle\"");
        } else {
            c.intersection = parse_set(in, d);
        }
    }
    c.anchor = root["anchor"].vec(d);
    for (std::size_t i = 0; i < c.sets.size(); ++i) {
        const double dist = distance(*c.sets[i], c.anchor);
        if (!(dist <= kMembershipTol)) {
            std::ostringstream msg;
            msg << "anchor is not in set " << i << " (distance " << dist << " exceeds " << kMembershipTol << ")";
            root["anchor"].fail(msg.str());
        }
    }
    if (c.intersection && !(distance(**c.intersection, c.anchor) <= kMembershipTol))
        root["anchor"].fail("anchor is not in the intersection");
    if (root.has("delta")) {
        c.delta = root["delta"].number();
        if (c.delta <= 0.0) root["delta"].fail("delta must be positive");
    }
    if (root.has("operators")) {
        const Node ops = root["operators"];
        for (std::size_t i = 0; i < ops.size(); ++i)
            c.operators.push_back(parse_operator(ops.at(i), static_cast<int>(c.sets.size())));
    }
    if (root.has("x0")) c.x0 = root["x0"].vec(d);
    if (c.x0 && c.operators.empty()) root["x0"].fail("x0 given without operators");
    if (root.has("budget")) {
        const Node b = root["budget"];
        b.only({"max_cycles", "tol"});
        if (b.has("max_cycles")) c.max_cycles = b["max_cycles"].integer_in(1, 10'000'000);
        if (b.has("tol")) {
            c.tol = b["tol"].number();
            if (c.tol <= 0.0) b["tol"].fail("tol must be positive");
        }
    }
    const Scope sc{c};
    std::optional<Node> an;
    if (root.has("analyses")) an = root["analyses"];
    c.analyses = normalize_analyses(an ? &*an : nullptr, sc);
    std::optional<Node> ex;
    if (root.has("expect")) ex = root["expect"];
    c.expect = normalize_expect(ex ? &*ex : nullptr, sc, c.analyses);
    return c;
}

} // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character
        const std::size_t upto = std::min(text.size(), e.byte == 0 ? 0 : e.byte - 1);
        int line = 1;
        for (std::size_t i = 0; i < upto; ++i)
            if (text[i] == '\n') ++line;
        std::string what = e.what();
        if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
        throw Error(ErrorKind::Config, source + ":" + std::to_string(line) + ": " + what);
    }
    const Context ctx{source, LineIndex(text)};
    ScenarioConfig c = parse_root(Node(doc, "", ctx));
    c.source = source;
    return c;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

json vec_to_json(const Vec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json set_to_json(const SetDescriptor<double>& s)
{
    return std::visit(
        [&](const auto& sh) -> json {
            using T = std::decay_t<decltype(sh)>;
            json out = {{"type", kind_name(s)}};
            auto cols = [](const Mat& m) {
                json a = json::array();
                for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(vec_to_json(m.col(j)));
                return a;
            };
            if constexpr (std::is_same_v<T, shapes::Halfspace<double>> || std::is_same_v<T, shapes::Hyperplane<double>>) {
                out["a"] = vec_to_json(sh.a);
                out["b"] = sh.b;
            } else if constexpr (std::is_same_v<T, shapes::AffineSubspace<double>>) {
                out["anchor"] = vec_to_json(sh.anchor);
                out["directions"] = cols(sh.basis);
            } else if constexpr (std::is_same_v<T, shapes::Ball<double>> || std::is_same_v<T, shapes::Sphere<double>>) {
                out["center"] = vec_to_json(sh.center);
                out["radius"] = sh.radius;
            } else if constexpr (std::is_same_v<T, shapes::Box<double>>) {
                out["lower"] = vec_to_json(sh.lower);
                out["upper"] = vec_to_json(sh.upper);
            } else if constexpr (std::is_same_v<T, shapes::Orthant<double>>) {
                out["signs"] = sh.signs;
            } else if constexpr (std::is_same_v<T, shapes::PolyhedralCone<double>>) {
                out["generators"] = cols(sh.generators);
            } else if constexpr (std::is_same_v<T, shapes::Enlargement<double>>) {
                out["inner"] = set_to_json(*sh.inner);
                out["tau"] = sh.tau;
            } else if constexpr (std::is_same_v<T, shapes::UnionOfSets<double>>) {
                out["members"] = json::array();
                for (const auto& m : sh.members) out["members"].push_back(set_to_json(*m));
            } else if constexpr (std::is_same_v<T, shapes::FinitePointSet<double>>) {
                out["points"] = json::array();
                for (const auto& p : sh.points) out["points"].push_back(vec_to_json(p));
            } else {
                out["inner"] = set_to_json(*sh.inner);
                out["shift"] = vec_to_json(sh.shift);
            }
            return out;
        },
        s.shape());
}

json to_json(const ScenarioConfig& c)
{
    json out;
    out["name"] = c.name;
    out["dimension"] = c.dimension;
    out["seed"] = c.seed;
    out["sets"] = json::array();
    for (const auto& s : c.sets) out["sets"].push_back(set_to_json(*s));
    out["intersection"] = c.intersection ? set_to_json(**c.intersection) : json("oracle");
    out["anchor"] = vec_to_json(c.anchor);
    out["delta"] = c.delta;
    out["operators"] = json::array();
    for (const auto& op : c.operators) out["operators"].push_back(operator_to_json(op));
    if (c.x0) out["x0"] = vec_to_json(*c.x0);
    out["budget"] = {{"max_cycles", c.max_cycles}, {"tol", c.tol}};
    out["analyses"] = c.analyses;
    out["expect"] = c.expect;
    return out;
}

CyclicTuple<double> build_cycle(const ScenarioConfig& c)
{
    std::vector<OperatorSpec<double>> ops;
    for (const auto& o : c.operators) {
        if (o.type == "relaxed")
            ops.push_back(make_relaxed(c.sets[static_cast<std::size_t>(o.set)], o.lambda));
        else if (o.type == "semi-intrepid")
            ops.push_back(make_semi_intrepid(c.sets[static_cast<std::size_t>(o.set)], o.alpha, o.tau));
        else
            ops.push_back(make_dr(c.sets[static_cast<std::size_t>(o.a)], c.sets[static_cast<std::size_t>(o.b)], o.lambda,
                                  o.mu, o.alpha));
    }
    return make_cycle(std::move(ops));
}

} // namespace projlab
