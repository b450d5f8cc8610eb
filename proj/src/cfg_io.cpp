#include <fstream>
#include <sstream>

#include "bcfa/cfg.hpp"

namespace bcfa {

namespace {

class LineScanner {
public:
    LineScanner(std::string_view line, std::size_t lineno) : line_(line), lineno_(lineno) {}

    bool at_end() {
        skip_space();
        return pos_ >= line_.size();
    }

    SourceLoc loc() const { return {lineno_, pos_ + 1}; }

    std::string word() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < line_.size() && !is_space(line_[pos_]) && line_[pos_] != '=') ++pos_;
        if (start == pos_) throw ParseError("expected a word", {lineno_, start + 1});
        return std::string(line_.substr(start, pos_ - start));
    }

    NodeId number() {
        skip_space();
        SourceLoc at = loc();
        std::string w = word();
        NodeId value = 0;
        for (char c : w) {
            if (c < '0' || c > '9') throw ParseError("expected a node id, got '" + w + "'", at);
            value = value * 10 + static_cast<NodeId>(c - '0');
        }
        return value;
    }

    bool consume(char c) {
        if (pos_ < line_.size() && line_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::vector<std::string> list() {
        std::vector<std::string> out;
        std::size_t start = pos_;
        while (pos_ <= line_.size()) {
            if (pos_ == line_.size() || line_[pos_] == ',' || is_space(line_[pos_])) {
                if (pos_ == start) throw ParseError("empty name in list", {lineno_, pos_ + 1});
                out.emplace_back(line_.substr(start, pos_ - start));
                if (pos_ < line_.size() && line_[pos_] == ',') {
                    start = ++pos_;
                    continue;
                }
                break;
            }
            ++pos_;
        }
        return out;
    }

    std::string quoted() {
        if (!consume('"')) throw ParseError("expected '\"'", loc());
        std::string out;
        while (pos_ < line_.size()) {
            char c = line_[pos_++];
            if (c == '"') return out;
            if (c == '\\' && pos_ < line_.size()) c = line_[pos_++];
            out.push_back(c);
        }
        throw ParseError("unterminated string", loc());
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }
    void skip_space() {
        while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
    }

    std::string_view line_;
    std::size_t lineno_;
    std::size_t pos_ = 0;
};

std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && in_string) {
            ++i;
        } else if (line[i] == '"') {
            in_string = !in_string;
        } else if (line[i] == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

} // namespace

Cfg parse_cfg(std::string_view text) {
    std::optional<CfgBuilder> builder;
    std::optional<DeclaredFlags> declared;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++lineno;

        LineScanner sc(strip_comment(raw), lineno);
        if (sc.at_end()) continue;
        SourceLoc at = sc.loc();
        std::string keyword = sc.word();
        if (keyword == "graph") {
            if (builder) throw ParseError("duplicate 'graph' line", at);
            builder.emplace(sc.word());
            DeclaredFlags flags;
            bool any = false;
            while (!sc.at_end()) {
                SourceLoc fat = sc.loc();
                std::string flag = sc.word();
                if (flag == "loop") flags.loop = true;
                else if (flag == "branch") flags.branch = true;
                else throw ParseError("unknown graph flag '" + flag + "'", fat);
                any = true;
            }
            if (any) declared = flags;
            continue;
        }
        if (!builder) throw ParseError("expected 'graph <name>' before '" + keyword + "'", at);
        if (keyword == "node") {
            NodeId id = sc.number();
            SourceLoc kat = sc.loc();
            std::string kind = sc.word();
            Stmt stmt;
            if (kind == "entry") stmt.kind = StmtKind::Entry;
            else if (kind == "exit") stmt.kind = StmtKind::Exit;
            else if (kind == "normal") stmt.kind = StmtKind::Normal;
            else throw ParseError("unknown node kind '" + kind + "'", kat);
            while (!sc.at_end()) {
                SourceLoc aat = sc.loc();
                std::string attr = sc.word();
                if (!sc.consume('=')) throw ParseError("expected '=' after '" + attr + "'", sc.loc());
                if (attr == "def") for (auto& v : sc.list()) stmt.defs.insert(std::move(v));
                else if (attr == "use") for (auto& v : sc.list()) stmt.uses.insert(std::move(v));
                else if (attr == "expr") for (auto& v : sc.list()) stmt.exprs.insert(std::move(v));
                else if (attr == "label") stmt.label = sc.quoted();
                else throw ParseError("unknown node attribute '" + attr + "'", aat);
            }
            try {
                builder->add_node(id, std::move(stmt));
            } catch (const CfgError& e) {
                throw ParseError(e.what(), at);
            }
        } else if (keyword == "edge") {
            NodeId src = sc.number();
            NodeId dst = sc.number();
            if (!sc.at_end()) throw ParseError("trailing text after edge", sc.loc());
            builder->add_edge(src, dst);
        } else {
            throw ParseError("unknown directive '" + keyword + "'", at);
        }
    }
    if (!builder) throw ParseError("missing 'graph' line", {lineno, 1});
    return std::move(*builder).build(declared);
}

Cfg load_cfg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_cfg(buf.str());
}

namespace {

void write_list(std::ostream& os, std::string_view key, const std::set<std::string>& items) {
    if (items.empty()) return;
    os << ' ' << key << '=';
    bool first = true;
    for (const auto& item : items) {
        if (!first) os << ',';
        os << item;
        first = false;
    }
}

} // namespace

std::string write_cfg(const Cfg& g) {
    std::ostringstream os;
    os << "graph " << g.name();
    if (auto flags = g.declared_flags()) {
        if (flags->loop) os << " loop";
        if (flags->branch) os << " branch";
    }
    os << '\n';
    for (const auto& n : g.nodes()) {
        os << "node " << n.id << ' ' << to_string(n.stmt.kind);
        write_list(os, "def", n.stmt.defs);
        write_list(os, "use", n.stmt.uses);
        write_list(os, "expr", n.stmt.exprs);
        if (n.stmt.label) {
            os << " label=\"";
            for (char c : *n.stmt.label) {
                if (c == '"' || c == '\\') os << '\\';
                os << c;
            }
            os << '"';
        }
        os << '\n';
    }
    for (auto [src, dst] : g.edges()) os << "edge " << src << ' ' << dst << '\n';
    return os.str();
}

} // namespace bcfa
