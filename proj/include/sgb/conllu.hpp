#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgb/adjacency.hpp"

namespace sgb {

struct Token {
    int index = 0;   // 1-based position within the sentence
    std::string surface;
    int head = 0;    // 1-based head position, 0 = root
    std::string deprel;
};

// How a word surface is cut into subword pieces. `Whole` keeps the word as a
// single piece; `Chunk` emits fixed-size character chunks where every
// non-initial piece carries the "##" continuation marker.
struct SubwordMode {
    enum Kind { Whole, Chunk } kind = Whole;
    std::size_t chunk_len = 4;

    static SubwordMode whole() { return {Whole, 0}; }
    static SubwordMode chunk(std::size_t k) { return {Chunk, k}; }
};

std::vector<std::string> subword_split(const std::string& surface, const SubwordMode& mode);

// One parsed sentence: tokens, the undirected dependency graph, directed
// gold relations, and the subword view used by the sequence encoder.
//
// The dependency root keeps a (root, root) entry in `relations` so the root
// relation participates in edge labeling like any other; adjacency diagonal
// self-loops already cover it.
struct SentenceGraph {
    std::string sent_id;                 // "# sent_id = ..." comment or 1-based position
    std::vector<std::string> comments;   // raw "#"-prefixed lines in order
    std::vector<Token> tokens;
    Adjacency adjacency;
    std::map<std::pair<int, int>, std::string> relations;  // (head, dep) 0-based; root is (r, r)

    std::vector<std::string> subwords;                   // includes the two special markers
    std::vector<std::vector<std::size_t>> subword_spans; // per token, indices into subwords
    std::size_t seq_start_pos = 0;
    std::size_t seq_end_pos = 0;

    std::size_t size() const { return tokens.size(); }
};

Adjacency build_adjacency(const std::vector<Token>& tokens);

// Fills subwords/spans/markers for the given split mode.
void tokenize_graph(SentenceGraph& graph, const SubwordMode& mode);

// Parses CoNLL-U text: blank-line separated sentences of 10+ tab-separated
// columns; "#" comments kept as metadata; multiword ranges ("1-2") and empty
// nodes ("1.1") skipped. Only ID, FORM, HEAD and DEPREL are interpreted.
// Throws ParseError (with line number) on malformed rows, non-integer or
// out-of-range heads, self-heads and head cycles.
std::vector<SentenceGraph> parse_conllu(const std::string& text,
                                        const SubwordMode& mode = SubwordMode::whole());

std::string serialize_conllu(const std::vector<SentenceGraph>& sentences);

// Relation label -> occurrence count over all gold edges, as CSV rows
// "relation,count" sorted by label.
std::string relation_stats_csv(const std::vector<SentenceGraph>& sentences);

// Fixed ids 0..3 are reserved; real tokens start at 4.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kSeqStart = 2;  // "[CLS]"
    static constexpr int kSeqEnd = 3;    // "[SEP]"

    Vocabulary();

    int add(const std::string& token);      // returns existing id if known
    int id(const std::string& token) const; // kUnk if missing
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(id_to_token_.size()); }
    const std::vector<std::string>& tokens() const { return id_to_token_; }

private:
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
};

// Vocabulary over every subword in the corpus (markers map to the reserved ids).
Vocabulary build_subword_vocab(const std::vector<SentenceGraph>& sentences);

// Subword id sequence for one sentence, [CLS]/[SEP] included.
std::vector<int> encode_subword_ids(const SentenceGraph& graph, const Vocabulary& vocab);

}  // namespace sgb
