#include "critdecay/config.hpp"

#include "critdecay/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace critdecay {

using nlohmann::json;

namespace {

class TomlParser {
public:
    explicit TomlParser(const std::string& text) : s_(text) {}

    json parse()
    {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_lines();
            if (eof())
                break;
            if (peek() == '[') {
                get();
                skip_space();
                const auto path = key_path();
                skip_space();
                expect(']');
                table = &descend(root, path, true);
            } else {
                const auto path = key_path();
                skip_space();
                expect('=');
                skip_space();
                json value = parse_value();
                json& parent = descend(*table, {path.begin(), path.end() - 1}, false);
                if (parent.contains(path.back()))
                    fail("duplicate key '" + path.back() + "'");
                parent[path.back()] = std::move(value);
            }
            end_of_line();
        }
        return root;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw InvalidArgument("config parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                              what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    char get()
    {
        const char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void expect(char c)
    {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        get();
    }
    void skip_space()
    {
        while (peek() == ' ' || peek() == '\t')
            get();
    }
    void skip_comment()
    {
        if (peek() == '#')
            while (!eof() && peek() != '\n')
                get();
    }
    void skip_blank_lines()
    {
        while (!eof()) {
            skip_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r')
                get();
            else
                break;
        }
    }
    // whitespace, comments and newlines inside arrays
    void skip_array_space()
    {
        while (!eof()) {
            skip_space();
            skip_comment();
            if (peek() == '\n' || peek() == '\r')
                get();
            else
                break;
        }
    }
    void end_of_line()
    {
        skip_space();
        skip_comment();
        if (peek() == '\r')
            get();
        if (!eof() && peek() != '\n')
            fail("unexpected trailing characters");
    }

    std::string bare_key()
    {
        std::string key;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')
            key += get();
        if (key.empty())
            fail("expected a key");
        return key;
    }

    std::vector<std::string> key_path()
    {
        std::vector<std::string> path;
        path.push_back(peek() == '"' ? parse_string() : bare_key());
        skip_space();
        while (peek() == '.') {
            get();
            skip_space();
            path.push_back(peek() == '"' ? parse_string() : bare_key());
            skip_space();
        }
        return path;
    }

    json& descend(json& root, const std::vector<std::string>& path, bool header)
    {
        json* node = &root;
        for (const auto& key : path) {
            if (!node->contains(key))
                (*node)[key] = json::object();
            node = &(*node)[key];
            if (!node->is_object())
                fail("'" + key + "' is not a table");
        }
        if (header && !node->empty())
            fail("table defined twice");
        return *node;
    }

    std::string parse_string()
    {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n')
                fail("unterminated string");
            char c = get();
            if (c == '"')
                break;
            if (c == '\\') {
                if (eof())
                    fail("unterminated escape");
                switch (char e = get()) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    json parse_number()
    {
        std::string tok;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == '_'))
            tok += get();
        std::string clean;
        for (char c : tok)
            if (c != '_')
                clean += c;
        const std::string body = (clean.size() && (clean[0] == '+' || clean[0] == '-')) ? clean.substr(1) : clean;
        const double sign = (clean.size() && clean[0] == '-') ? -1.0 : 1.0;
        if (body == "inf")
            return sign * std::numeric_limits<double>::infinity();
        if (body == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (clean.empty())
            fail("expected a value");
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        std::size_t used = 0;
        try {
            if (is_float) {
                const double v = std::stod(clean, &used);
                if (used == clean.size())
                    return v;
            } else {
                const long long v = std::stoll(clean, &used, 10);
                if (used == clean.size())
                    return v;
            }
        } catch (const std::exception&) {
        }
        fail("invalid number '" + tok + "'");
    }

    json parse_value()
    {
        const char c = peek();
        if (c == '"')
            return parse_string();
        if (c == '[') {
            get();
            json arr = json::array();
            skip_array_space();
            while (peek() != ']') {
                arr.push_back(parse_value());
                skip_array_space();
                if (peek() == ',') {
                    get();
                    skip_array_space();
                } else if (peek() != ']') {
                    fail("expected ',' or ']'");
                }
            }
            get();
            return arr;
        }
        if (s_.compare(pos_, 4, "true") == 0) {
            for (int i = 0; i < 4; ++i)
                get();
            return true;
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            for (int i = 0; i < 5; ++i)
                get();
            return false;
        }
        return parse_number();
    }
};

// Pulls keys out of one section, rejecting anything left over.
class Section {
public:
    Section(const json& doc, const std::string& name, json& echo) : name_(name), echo_(echo[name])
    {
        if (doc.contains(name)) {
            if (!doc.at(name).is_object())
                throw InvalidArgument("config: '" + name + "' must be a table");
            node_ = doc.at(name);
        } else {
            node_ = json::object();
        }
        echo_ = json::object();
    }

    ~Section() noexcept(false)
    {
        if (std::uncaught_exceptions())
            return;
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key()))
                throw InvalidArgument("config: unknown key '" + name_ + "." + it.key() + "'");
    }

    double number(const std::string& key, double fallback)
    {
        if (!take(key))
            return record(key, fallback);
        const json& v = node_.at(key);
        if (!v.is_number())
            bad(key, "a number");
        return record(key, v.get<double>());
    }

    int integer(const std::string& key, int fallback)
    {
        if (!take(key))
            return record(key, fallback);
        const json& v = node_.at(key);
        if (!v.is_number_integer())
            bad(key, "an integer");
        return record(key, v.get<int>());
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!take(key))
            return record(key, fallback);
        const json& v = node_.at(key);
        if (!v.is_boolean())
            bad(key, "a boolean");
        return record(key, v.get<bool>());
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        if (!take(key))
            return record(key, fallback);
        const json& v = node_.at(key);
        if (!v.is_string())
            bad(key, "a string");
        return record(key, v.get<std::string>());
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback)
    {
        if (!take(key))
            return record(key, fallback);
        const json& v = node_.at(key);
        if (!v.is_array())
            bad(key, "an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number())
                bad(key, "an array of numbers");
            out.push_back(e.get<double>());
        }
        return record(key, out);
    }

    const json* raw(const std::string& key)
    {
        return take(key) ? &node_.at(key) : nullptr;
    }

    void echo(const std::string& key, json value) { echo_[key] = std::move(value); }

    [[noreturn]] void invalid(const std::string& key, const std::string& why) const
    {
        throw InvalidArgument("config: invalid '" + name_ + "." + key + "': " + why);
    }

private:
    std::string name_;
    json node_;
    json& echo_;
    std::set<std::string> seen_;

    bool take(const std::string& key)
    {
        seen_.insert(key);
        return node_.contains(key);
    }
    template <class T> T record(const std::string& key, T value)
    {
        echo_[key] = value;
        return value;
    }
    [[noreturn]] void bad(const std::string& key, const std::string& what) const
    {
        throw InvalidArgument("config: '" + name_ + "." + key + "' must be " + what);
    }
};

GridConfig read_grid(Section& sec, GridConfig g)
{
    g.rmin = sec.number("rmin", g.rmin);
    g.rmax = sec.number("rmax", g.rmax);
    g.N = sec.integer("N", g.N);
    if (!(g.rmin > 0.0))
        sec.invalid("rmin", "must be positive");
    if (!(g.rmax > g.rmin))
        sec.invalid("rmax", "must exceed rmin");
    if (g.N < 64)
        sec.invalid("N", "must be at least 64");
    return g;
}

} // namespace

json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

RunConfig config_from_json(const json& doc)
{
    static const std::set<std::string> sections{"potential", "grid",   "scan",  "evolution",
                                                "oplab",     "dipole", "output"};
    if (!doc.is_object())
        throw InvalidArgument("config: top level must be a table");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!sections.count(it.key()))
            throw InvalidArgument("config: unknown key '" + it.key() + "'");

    RunConfig cfg;
    cfg.echo = json::object();
    {
        Section sec(doc, "potential", cfg.echo);
        auto& p = cfg.potential;
        p.kind = sec.string("kind", p.kind);
        p.n = sec.integer("n", p.n);
        p.a = sec.number("a", p.a);
        p.p = sec.number("p", p.p);
        p.profile = sec.string("profile", p.profile);
        p.eps = sec.number("eps", p.eps);
        p.legendre = sec.numbers("legendre", p.legendre);
        static const std::set<std::string> kinds{"zero", "inverse_square", "radial", "homogeneous_angular",
                                                 "dipole"};
        if (!kinds.count(p.kind))
            sec.invalid("kind", "unknown potential kind '" + p.kind + "'");
        if (p.n < 3)
            sec.invalid("n", "dimension must be at least 3");
        if (p.kind == "dipole" && p.n != 3)
            sec.invalid("n", "dipole potential requires n = 3");
        if (p.profile != "power" && p.profile != "exp")
            sec.invalid("profile", "expected \"power\" or \"exp\"");
        if (p.kind == "homogeneous_angular" && p.legendre.empty())
            sec.invalid("legendre", "homogeneous_angular needs Legendre coefficients");
    }
    {
        Section sec(doc, "grid", cfg.echo);
        cfg.grid = read_grid(sec, cfg.grid);
    }
    {
        Section sec(doc, "scan", cfg.echo);
        auto& s = cfg.scan;
        if (const json* z = sec.raw("z_set")) {
            if (z->is_string() && z->get<std::string>() == "default") {
                sec.echo("z_set", "default");
            } else if (z->is_array()) {
                for (const auto& e : *z) {
                    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                        sec.invalid("z_set", "expected \"default\" or an array of [re, im] pairs");
                    std::complex<double> zc(e[0].get<double>(), e[1].get<double>());
                    if (!(zc.real() > 0.0))
                        sec.invalid("z_set", "every z needs Re z > 0");
                    s.z_set.push_back(zc);
                }
                sec.echo("z_set", *z);
            } else {
                sec.invalid("z_set", "expected \"default\" or an array of [re, im] pairs");
            }
        } else {
            sec.echo("z_set", "default");
        }
        s.f_centers = sec.numbers("f_centers", {0.1, 1.0, 10.0});
        s.lmax = sec.integer("lmax", s.lmax);
        for (double c : s.f_centers)
            if (!(c > 0.0))
                sec.invalid("f_centers", "centers must be positive");
        if (s.lmax < 8)
            sec.invalid("lmax", "must be at least 8");
    }
    {
        Section sec(doc, "evolution", cfg.echo);
        auto& e = cfg.evolution;
        const std::string eq = sec.string("equation", "schrodinger");
        if (eq == "schrodinger")
            e.equation = Equation::schrodinger;
        else if (eq == "wave")
            e.equation = Equation::wave;
        else
            sec.invalid("equation", "expected \"schrodinger\" or \"wave\"");
        const std::string method = sec.string("method", to_string(e.method));
        try {
            e.method = method_from_string(method);
        } catch (const Error&) {
            sec.invalid("method", "unknown method '" + method + "'");
        }
        e.T = sec.number("T", e.T);
        e.dt = sec.number("dt", e.dt);
        e.lmax = sec.integer("lmax", e.lmax);
        e.data = sec.string("data", e.data);
        e.width = sec.number("width", e.width);
        e.strichartz_p = sec.numbers("strichartz_p", e.equation == Equation::schrodinger ? std::vector<double>{2.0}
                                                                                         : std::vector<double>{4.0});
        e.grid.rmin = sec.number("rmin", e.grid.rmin);
        e.grid.rmax = sec.number("rmax", e.grid.rmax);
        e.grid.N = sec.integer("N", e.grid.N);
        if (!(e.T > 0.0))
            sec.invalid("T", "must be positive");
        if (!(e.dt > 0.0) || e.dt > e.T)
            sec.invalid("dt", "must lie in (0, T]");
        if (e.lmax < 0)
            sec.invalid("lmax", "must be non-negative");
        if (e.data != "channel_gaussian" && e.data != "gaussian")
            sec.invalid("data", "expected \"channel_gaussian\" or \"gaussian\"");
        if (!(e.width > 0.0))
            sec.invalid("width", "must be positive");
        if (!(e.grid.rmin > 0.0) || !(e.grid.rmax > e.grid.rmin) || e.grid.N < 64)
            sec.invalid("rmin", "evolution grid needs 0 < rmin < rmax and N >= 64");
        for (double p : e.strichartz_p) {
            const bool ok = e.equation == Equation::schrodinger ? p >= 2.0 : p > 2.0;
            if (!ok)
                sec.invalid("strichartz_p", "exponent outside the admissible range");
        }
    }
    {
        Section sec(doc, "oplab", cfg.echo);
        auto& o = cfg.oplab;
        o.size = sec.integer("size", o.size);
        o.count = sec.integer("count", o.count);
        o.alphas = sec.numbers("alphas", o.alphas);
        o.gamma = sec.number("gamma", o.gamma);
        o.nu = sec.numbers("nu", o.nu);
        o.c1_N = sec.integer("c1_N", o.c1_N);
        if (o.size < 2)
            sec.invalid("size", "must be at least 2");
        if (o.count < 0)
            sec.invalid("count", "must be non-negative");
        for (double a : o.alphas)
            if (!(a > 0.0))
                sec.invalid("alphas", "identities need alpha > 0");
        if (!(o.gamma > 0.0))
            sec.invalid("gamma", "must be positive");
        if (o.c1_N < 64)
            sec.invalid("c1_N", "must be at least 64");
    }
    {
        Section sec(doc, "dipole", cfg.echo);
        auto& d = cfg.dipole;
        d.tol = sec.number("tol", d.tol);
        d.lmax = sec.integer("lmax", d.lmax);
        d.curve_points = sec.integer("curve_points", d.curve_points);
        if (!(d.tol >= 1e-10))
            sec.invalid("tol", "must be at least 1e-10");
        if (d.lmax < 8)
            sec.invalid("lmax", "must be at least 8");
        if (d.curve_points < 2)
            sec.invalid("curve_points", "must be at least 2");
    }
    {
        Section sec(doc, "output", cfg.echo);
        cfg.output.dir = sec.string("dir", cfg.output.dir);
        cfg.output.csv = sec.boolean("csv", cfg.output.csv);
    }
    return cfg;
}

RunConfig parse_config_string(const std::string& text) { return config_from_json(parse_toml(text)); }

RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

} // namespace critdecay
