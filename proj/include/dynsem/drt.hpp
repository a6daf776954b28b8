#pragma once

// Discourse representation construction as an abstract machine. A sentence
// is parsed into constituents, each triggering one command; stepping a
// configuration consumes one command and grows the output DRS.

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynsem/error.hpp"

namespace dynsem::drt {

enum class Category { IndefDet, Noun, ProperName, Pronoun, IntransVerb, TransVerb };

std::string to_string(Category c);
Category parse_category(std::string_view text);

struct LexEntry {
    Category category;
    // Predicate for nouns and verbs, constant for proper names, empty otherwise.
    std::string symbol;
};

class Lexicon {
public:
    void add(const std::string& word, Category c, std::string symbol = {});
    const LexEntry* find(std::string_view word) const;
    const std::map<std::string, LexEntry, std::less<>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, LexEntry, std::less<>> entries_;
};

// Lines of `word category [symbol]`; `#` starts a comment.
Lexicon parse_lexicon(std::string_view text);

enum class Command { NewMarker, PushMarker, ResolvePronoun, EmitCondition };

std::string to_string(Command c);

struct Constituent {
    Category category;
    std::string word;
    std::string symbol;

    friend bool operator==(const Constituent&, const Constituent&) = default;
};

struct Instruction {
    Constituent constituent;
    Command command;

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Constituents of one sentence in evaluation order: subject, object, verb.
using SentenceStream = std::vector<Instruction>;

// Splits a text into sentences: one per line, and ` . ` inside a line.
std::vector<std::string> split_sentences(std::string_view text);
SentenceStream parse_sentence(std::string_view sentence, const Lexicon& lex, std::size_t index = 1);
std::vector<SentenceStream> parse_discourse(std::string_view text, const Lexicon& lex);

struct Condition {
    // A predicate over markers, or "=" with a marker and a constant.
    std::string predicate;
    std::vector<std::string> args;

    bool is_identity() const noexcept { return predicate == "="; }

    friend auto operator<=>(const Condition&, const Condition&) = default;
};

std::string render(const Condition& c);

struct DRS {
    // Creation order.
    std::vector<std::string> markers;
    // Insertion order, no duplicates.
    std::vector<Condition> conditions;

    bool has_marker(std::string_view m) const;
    void add_condition(Condition c);

    friend bool operator==(const DRS&, const DRS&) = default;
};

std::string render(const DRS& d);
std::ostream& operator<<(std::ostream& os, const DRS& d);

// True iff mapping the i-th marker of `a` to the i-th marker of `b` turns
// the condition set of `a` into that of `b`.
bool drs_alpha_equal(const DRS& a, const DRS& b);

class UnresolvedPronoun : public Error {
public:
    using Error::Error;
};

// Produces the name of the k-th fresh marker (k from 0).
using MarkerNamer = std::function<std::string(std::size_t)>;
std::string default_marker_name(std::size_t k);

struct MachineConfig {
    // Next instruction at the back.
    std::vector<Instruction> control;
    DRS input;
    std::vector<std::string> values;
    DRS output;
    std::size_t fresh = 0;
};

MachineConfig load(const std::vector<SentenceStream>& sentences, const DRS& initial);

// The marker a pronoun refers to: the most recently introduced one.
std::optional<std::string> resolve_pronoun(const DRS& d);

// Consumes exactly one instruction.
MachineConfig step(MachineConfig c, const MarkerNamer& namer = default_marker_name);

DRS run_discourse(const std::vector<SentenceStream>& sentences, const DRS& initial = {},
                  const MarkerNamer& namer = default_marker_name);
DRS run_discourse(std::string_view text, const Lexicon& lex, const DRS& initial = {});

// What a filled context produces: a DRS, or the sentence (1-based) whose
// pronoun could not be resolved.
struct Observation {
    std::optional<DRS> drs;
    std::size_t unresolved_sentence = 0;
    std::string message;
};

bool same_observation(const Observation& a, const Observation& b);

// A text with exactly one sentence that is the hole `[]`.
struct TextContext {
    std::vector<std::string> before;
    std::vector<std::string> after;

    std::vector<std::string> fill(const std::string& sentence) const;
    std::string render() const;
};

inline constexpr std::string_view kTextHole = "[]";

TextContext parse_text_context(std::string_view line);
// One context per non-comment line.
std::vector<TextContext> parse_text_contexts(std::string_view text);

Observation observe(const std::vector<std::string>& sentences, const Lexicon& lex);

struct SentenceVerdict {
    bool equivalent = true;
    std::size_t contexts_checked = 0;
    // Set when a context distinguishes the sentences.
    std::optional<std::size_t> context;
    Observation first;
    Observation second;
};

SentenceVerdict sentence_equivalent(const std::string& s1, const std::string& s2,
                                    const std::vector<TextContext>& contexts, const Lexicon& lex);

}  // namespace dynsem::drt
