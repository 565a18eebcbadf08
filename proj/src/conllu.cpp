#include "sgb/conllu.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sgb/error.hpp"

namespace sgb {

namespace {

constexpr const char* kSeqStartMark = "[CLS]";
constexpr const char* kSeqEndMark = "[SEP]";

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    int value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

// Splits a UTF-8 string into code points so chunking never cuts a
// multi-byte character in half.
std::vector<std::string> utf8_chars(const std::string& s) {
    std::vector<std::string> chars;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((c & 0x80u) == 0x00u) len = 1;
        else if ((c & 0xE0u) == 0xC0u) len = 2;
        else if ((c & 0xF0u) == 0xE0u) len = 3;
        else if ((c & 0xF8u) == 0xF0u) len = 4;
        len = std::min(len, s.size() - i);
        chars.push_back(s.substr(i, len));
        i += len;
    }
    return chars;
}

struct PendingSentence {
    std::vector<std::string> comments;
    std::vector<Token> tokens;
    std::vector<std::size_t> token_lines;
    std::size_t first_line = 0;
};

SentenceGraph finish_sentence(PendingSentence& pending, std::size_t position,
                              const SubwordMode& mode) {
    const int n = static_cast<int>(pending.tokens.size());
    for (std::size_t k = 0; k < pending.tokens.size(); ++k) {
        const Token& t = pending.tokens[k];
        if (t.head > n) {
            throw ParseError(pending.token_lines[k],
                             "HEAD " + std::to_string(t.head) + " out of range for a " +
                                 std::to_string(n) + "-token sentence");
        }
    }
    // Reject head cycles: follow head links from each token; a well-formed
    // chain reaches the root (head 0) in <= n hops.
    for (int start = 1; start <= n; ++start) {
        int cur = start;
        int hops = 0;
        while (cur != 0) {
            cur = pending.tokens[static_cast<std::size_t>(cur - 1)].head;
            if (++hops > n) {
                throw ParseError(pending.token_lines[static_cast<std::size_t>(start - 1)],
                                 "cyclic HEAD chain involving token " + std::to_string(start));
            }
        }
    }

    SentenceGraph graph;
    graph.comments = std::move(pending.comments);
    graph.tokens = std::move(pending.tokens);
    graph.sent_id = std::to_string(position);
    for (const std::string& c : graph.comments) {
        const std::string key = "# sent_id = ";
        if (c.rfind(key, 0) == 0) graph.sent_id = c.substr(key.size());
    }
    graph.adjacency = build_adjacency(graph.tokens);
    for (const Token& t : graph.tokens) {
        const int dep = t.index - 1;
        const int head = t.head == 0 ? dep : t.head - 1;
        graph.relations[{head, dep}] = t.deprel;
    }
    tokenize_graph(graph, mode);
    return graph;
}

}  // namespace

std::vector<std::string> subword_split(const std::string& surface, const SubwordMode& mode) {
    if (surface.empty()) throw std::invalid_argument("subword_split: empty surface");
    if (mode.kind == SubwordMode::Whole) return {surface};
    if (mode.chunk_len == 0) throw std::invalid_argument("subword_split: chunk length must be positive");
    const std::vector<std::string> chars = utf8_chars(surface);
    std::vector<std::string> pieces;
    for (std::size_t i = 0; i < chars.size(); i += mode.chunk_len) {
        std::string piece = i == 0 ? "" : "##";
        for (std::size_t j = i; j < std::min(chars.size(), i + mode.chunk_len); ++j) piece += chars[j];
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

Adjacency build_adjacency(const std::vector<Token>& tokens) {
    Adjacency adj(tokens.size());
    for (const Token& t : tokens) {
        if (t.head == 0) continue;
        adj.connect(static_cast<std::size_t>(t.head - 1), static_cast<std::size_t>(t.index - 1));
    }
    return adj;
}

void tokenize_graph(SentenceGraph& graph, const SubwordMode& mode) {
    graph.subwords.clear();
    graph.subword_spans.assign(graph.tokens.size(), {});
    graph.subwords.push_back(kSeqStartMark);
    graph.seq_start_pos = 0;
    for (std::size_t t = 0; t < graph.tokens.size(); ++t) {
        for (std::string& piece : subword_split(graph.tokens[t].surface, mode)) {
            graph.subword_spans[t].push_back(graph.subwords.size());
            graph.subwords.push_back(std::move(piece));
        }
    }
    graph.seq_end_pos = graph.subwords.size();
    graph.subwords.push_back(kSeqEndMark);
}

std::vector<SentenceGraph> parse_conllu(const std::string& text, const SubwordMode& mode) {
    std::vector<SentenceGraph> sentences;
    PendingSentence pending;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&]() {
        if (pending.tokens.empty() && pending.comments.empty()) return;
        if (pending.tokens.empty()) {
            throw ParseError(pending.first_line, "comment block without any token lines");
        }
        sentences.push_back(finish_sentence(pending, sentences.size() + 1, mode));
        pending = PendingSentence{};
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (pending.tokens.empty() && pending.comments.empty()) pending.first_line = line_no;
        if (line[0] == '#') {
            pending.comments.push_back(line);
            continue;
        }
        const std::vector<std::string> fields = split_tabs(line);
        if (fields.size() < 10) {
            throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                          std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        // Multiword token ranges ("1-2") and empty nodes ("1.1") carry no
        // syntactic head of their own.
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;

        Token token;
        if (!parse_int(id, token.index) || token.index < 1) {
            throw ParseError(line_no, "bad token ID '" + id + "'");
        }
        if (static_cast<std::size_t>(token.index) != pending.tokens.size() + 1) {
            throw ParseError(line_no, "token ID " + id + " out of sequence");
        }
        token.surface = fields[1];
        if (!parse_int(fields[6], token.head)) {
            throw ParseError(line_no, "non-integer HEAD '" + fields[6] + "'");
        }
        if (token.head == token.index) {
            throw ParseError(line_no, "token " + id + " is its own head");
        }
        token.deprel = fields[7];
        if (token.deprel.empty() || token.deprel == "_") {
            throw ParseError(line_no, "missing DEPREL for token " + id);
        }
        pending.tokens.push_back(std::move(token));
        pending.token_lines.push_back(line_no);
    }
    flush();
    return sentences;
}

std::string serialize_conllu(const std::vector<SentenceGraph>& sentences) {
    std::ostringstream out;
    for (const SentenceGraph& s : sentences) {
        for (const std::string& c : s.comments) out << c << "\n";
        for (const Token& t : s.tokens) {
            out << t.index << "\t" << t.surface << "\t_\t_\t_\t_\t" << t.head << "\t" << t.deprel
                << "\t_\t_\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string relation_stats_csv(const std::vector<SentenceGraph>& sentences) {
    std::map<std::string, std::size_t> counts;
    for (const SentenceGraph& s : sentences) {
        for (const auto& [edge, label] : s.relations) ++counts[label];
    }
    std::ostringstream out;
    out << "relation,count\n";
    for (const auto& [label, count] : counts) out << label << "," << count << "\n";
    return out.str();
}

Vocabulary::Vocabulary() {
    id_to_token_ = {"[PAD]", "[UNK]", kSeqStartMark, kSeqEndMark};
    for (int i = 0; i < 4; ++i) token_to_id_[id_to_token_[static_cast<std::size_t>(i)]] = i;
}

int Vocabulary::add(const std::string& token) {
    auto it = token_to_id_.find(token);
    if (it != token_to_id_.end()) return it->second;
    const int id = size();
    id_to_token_.push_back(token);
    token_to_id_[token] = id;
    return id;
}

int Vocabulary::id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("vocabulary id " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
}

Vocabulary build_subword_vocab(const std::vector<SentenceGraph>& sentences) {
    Vocabulary vocab;
    for (const SentenceGraph& s : sentences) {
        for (const std::string& piece : s.subwords) vocab.add(piece);
    }
    return vocab;
}

std::vector<int> encode_subword_ids(const SentenceGraph& graph, const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(graph.subwords.size());
    for (const std::string& piece : graph.subwords) ids.push_back(vocab.id(piece));
    return ids;
}

}  // namespace sgb
