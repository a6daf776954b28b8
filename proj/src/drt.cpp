#include "dynsem/drt.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace dynsem::drt {

namespace {

constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::IndefDet, "IndefDet"},       {Category::Noun, "Noun"},
    {Category::ProperName, "ProperName"},   {Category::Pronoun, "Pronoun"},
    {Category::IntransVerb, "IntransVerb"}, {Category::TransVerb, "TransVerb"},
};

std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::string_view strip_comment(std::string_view line) {
    auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool needs_symbol(Category c) { return c != Category::IndefDet && c != Category::Pronoun; }

}  // namespace

std::string to_string(Category c) {
    for (const auto& [cat, name] : kCategoryNames) {
        if (cat == c) return std::string(name);
    }
    return "?";
}

Category parse_category(std::string_view text) {
    for (const auto& [cat, name] : kCategoryNames) {
        if (name == text) return cat;
    }
    throw Error("unknown lexical category '" + std::string(text) + "'");
}

std::string to_string(Command c) {
    switch (c) {
    case Command::NewMarker:
        return "NewMarker";
    case Command::PushMarker:
        return "PushMarker";
    case Command::ResolvePronoun:
        return "ResolvePronoun";
    case Command::EmitCondition:
        return "EmitCondition";
    }
    return "?";
}

void Lexicon::add(const std::string& word, Category c, std::string symbol) {
    if (word.empty()) throw Error("empty word in lexicon");
    if (needs_symbol(c) && symbol.empty()) throw Error("lexicon entry '" + word + "' needs a symbol");
    auto [it, inserted] = entries_.emplace(word, LexEntry{c, std::move(symbol)});
    if (!inserted && it->second.category != c) {
        throw Error("word '" + word + "' listed with two categories");
    }
}

const LexEntry* Lexicon::find(std::string_view word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
}

Lexicon parse_lexicon(std::string_view text) {
    Lexicon lex;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto w = words_of(strip_comment(line));
        if (w.empty()) continue;
        if (w.size() < 2 || w.size() > 3) throw SyntaxError("expected 'word category [symbol]'", lineno, 1);
        Category c;
        try {
            c = parse_category(w[1]);
        } catch (const Error& e) {
            throw SyntaxError(e.what(), lineno, 1);
        }
        try {
            lex.add(w[0], c, w.size() == 3 ? w[2] : std::string{});
        } catch (const Error& e) {
            throw SyntaxError(e.what(), lineno, 1);
        }
    }
    return lex;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> current;
        auto flush = [&] {
            if (current.empty()) return;
            std::string s;
            for (const auto& w : current) s += (s.empty() ? "" : " ") + w;
            out.push_back(std::move(s));
            current.clear();
        };
        for (std::string w : words_of(strip_comment(line))) {
            if (w == ".") {
                flush();
                continue;
            }
            bool ends = w.size() > 1 && w.back() == '.';
            if (ends) w.pop_back();
            current.push_back(w);
            if (ends) flush();
        }
        flush();
    }
    return out;
}

SentenceStream parse_sentence(std::string_view sentence, const Lexicon& lex, std::size_t index) {
    auto words = words_of(sentence);
    std::vector<const LexEntry*> entries;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const LexEntry* e = lex.find(words[i]);
        if (!e) throw SyntaxError("word '" + words[i] + "' is not in the lexicon", index, i + 1);
        entries.push_back(e);
    }
    std::size_t pos = 0;
    SentenceStream out;
    auto emit = [&](Command cmd) {
        out.push_back(Instruction{Constituent{entries[pos]->category, words[pos], entries[pos]->symbol}, cmd});
        ++pos;
    };
    auto fail = [&](const std::string& what) -> SyntaxError {
        if (pos >= words.size()) return SyntaxError(what + " (sentence ended)", index, words.size() + 1);
        return SyntaxError(what + ", found '" + words[pos] + "'", index, pos + 1);
    };
    auto noun_phrase = [&] {
        if (pos >= words.size()) throw fail("expected a noun phrase");
        switch (entries[pos]->category) {
        case Category::IndefDet:
            emit(Command::NewMarker);
            if (pos >= words.size() || entries[pos]->category != Category::Noun) throw fail("expected a noun");
            emit(Command::EmitCondition);
            return;
        case Category::ProperName:
            emit(Command::PushMarker);
            return;
        case Category::Pronoun:
            emit(Command::ResolvePronoun);
            return;
        default:
            throw fail("expected a noun phrase");
        }
    };
    noun_phrase();
    if (pos >= words.size()) throw fail("expected a verb");
    std::size_t verb = pos;
    if (entries[verb]->category == Category::IntransVerb) {
        ++pos;
    } else if (entries[verb]->category == Category::TransVerb) {
        ++pos;
        noun_phrase();
    } else {
        throw fail("expected a verb");
    }
    if (pos != words.size()) throw fail("expected end of sentence");
    out.push_back(Instruction{Constituent{entries[verb]->category, words[verb], entries[verb]->symbol},
                              Command::EmitCondition});
    return out;
}

std::vector<SentenceStream> parse_discourse(std::string_view text, const Lexicon& lex) {
    std::vector<SentenceStream> out;
    auto sentences = split_sentences(text);
    for (std::size_t i = 0; i < sentences.size(); ++i) out.push_back(parse_sentence(sentences[i], lex, i + 1));
    return out;
}

std::string render(const Condition& c) {
    if (c.is_identity()) return c.args.at(0) + " = " + c.args.at(1);
    std::string s = c.predicate + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) s += (i ? ", " : "") + c.args[i];
    return s + ")";
}

bool DRS::has_marker(std::string_view m) const {
    return std::find(markers.begin(), markers.end(), m) != markers.end();
}

void DRS::add_condition(Condition c) {
    if (std::find(conditions.begin(), conditions.end(), c) == conditions.end()) conditions.push_back(std::move(c));
}

std::string render(const DRS& d) {
    std::string s = "[";
    for (std::size_t i = 0; i < d.markers.size(); ++i) s += (i ? ", " : "") + d.markers[i];
    s += "] {";
    for (std::size_t i = 0; i < d.conditions.size(); ++i) s += (i ? ", " : "") + render(d.conditions[i]);
    return s + "}";
}

std::ostream& operator<<(std::ostream& os, const DRS& d) { return os << render(d); }

bool drs_alpha_equal(const DRS& a, const DRS& b) {
    if (a.markers.size() != b.markers.size() || a.conditions.size() != b.conditions.size()) return false;
    std::map<std::string, std::string> rename;
    for (std::size_t i = 0; i < a.markers.size(); ++i) rename[a.markers[i]] = b.markers[i];
    std::set<Condition> mapped;
    for (Condition c : a.conditions) {
        for (auto& arg : c.args) {
            auto it = rename.find(arg);
            if (it != rename.end()) arg = it->second;
        }
        mapped.insert(std::move(c));
    }
    return mapped == std::set<Condition>(b.conditions.begin(), b.conditions.end());
}

std::string default_marker_name(std::size_t k) { return "u" + std::to_string(k + 1); }

MachineConfig load(const std::vector<SentenceStream>& sentences, const DRS& initial) {
    MachineConfig c;
    for (auto it = sentences.rbegin(); it != sentences.rend(); ++it) {
        c.control.insert(c.control.end(), it->rbegin(), it->rend());
    }
    c.input = initial;
    c.output = initial;
    return c;
}

std::optional<std::string> resolve_pronoun(const DRS& d) {
    if (d.markers.empty()) return std::nullopt;
    return d.markers.back();
}

namespace {

std::string fresh_marker(MachineConfig& c, const MarkerNamer& namer) {
    std::string m;
    do {
        m = namer(c.fresh++);
    } while (c.output.has_marker(m));
    c.output.markers.push_back(m);
    return m;
}

std::string pop_value(MachineConfig& c) {
    if (c.values.empty()) throw Error("value stack underflow");
    std::string v = std::move(c.values.back());
    c.values.pop_back();
    return v;
}

}  // namespace

MachineConfig step(MachineConfig c, const MarkerNamer& namer) {
    if (c.control.empty()) throw Error("no instruction left to step");
    Instruction ins = std::move(c.control.back());
    c.control.pop_back();
    const Constituent& k = ins.constituent;
    switch (ins.command) {
    case Command::NewMarker:
        c.values.push_back(fresh_marker(c, namer));
        break;
    case Command::PushMarker: {
        std::optional<std::string> found;
        for (const auto& cond : c.output.conditions) {
            if (cond.is_identity() && cond.args[1] == k.symbol) {
                found = cond.args[0];
                break;
            }
        }
        if (!found) {
            found = fresh_marker(c, namer);
            c.output.add_condition(Condition{"=", {*found, k.symbol}});
        }
        c.values.push_back(*found);
        break;
    }
    case Command::ResolvePronoun: {
        auto m = resolve_pronoun(c.output);
        if (!m) throw UnresolvedPronoun("pronoun '" + k.word + "' has no antecedent");
        c.values.push_back(*m);
        break;
    }
    case Command::EmitCondition:
        if (k.category == Category::TransVerb) {
            std::string object = pop_value(c);
            std::string subject = pop_value(c);
            c.output.add_condition(Condition{k.symbol, {subject, object}});
        } else {
            std::string arg = pop_value(c);
            c.output.add_condition(Condition{k.symbol, {arg}});
            // A noun's marker is also the value of its noun phrase.
            if (k.category == Category::Noun) c.values.push_back(arg);
        }
        break;
    }
    return c;
}

DRS run_discourse(const std::vector<SentenceStream>& sentences, const DRS& initial, const MarkerNamer& namer) {
    DRS current = initial;
    std::size_t fresh = 0;
    for (const auto& s : sentences) {
        MachineConfig c = load({s}, current);
        c.fresh = fresh;
        while (!c.control.empty()) c = step(std::move(c), namer);
        if (!c.values.empty()) throw Error("value stack not empty at sentence boundary");
        current = std::move(c.output);
        fresh = c.fresh;
    }
    return current;
}

DRS run_discourse(std::string_view text, const Lexicon& lex, const DRS& initial) {
    return run_discourse(parse_discourse(text, lex), initial);
}

bool same_observation(const Observation& a, const Observation& b) {
    if (a.drs && b.drs) return drs_alpha_equal(*a.drs, *b.drs);
    if (!a.drs && !b.drs) return a.unresolved_sentence == b.unresolved_sentence;
    return false;
}

std::vector<std::string> TextContext::fill(const std::string& sentence) const {
    std::vector<std::string> out = before;
    out.push_back(sentence);
    out.insert(out.end(), after.begin(), after.end());
    return out;
}

std::string TextContext::render() const {
    std::string s;
    for (const auto& x : fill(std::string(kTextHole))) s += (s.empty() ? "" : " . ") + x;
    return s;
}

TextContext parse_text_context(std::string_view line) {
    TextContext c;
    bool hole = false;
    for (auto& s : split_sentences(line)) {
        if (s == kTextHole) {
            if (hole) throw MalformedError("text context has more than one hole");
            hole = true;
        } else if (s.find(kTextHole) != std::string::npos) {
            throw MalformedError("the hole must stand for a whole sentence: '" + s + "'");
        } else {
            (hole ? c.after : c.before).push_back(std::move(s));
        }
    }
    if (!hole) throw MalformedError("text context has no hole");
    return c;
}

std::vector<TextContext> parse_text_contexts(std::string_view text) {
    std::vector<TextContext> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (words_of(strip_comment(line)).empty()) continue;
        out.push_back(parse_text_context(strip_comment(line)));
    }
    return out;
}

Observation observe(const std::vector<std::string>& sentences, const Lexicon& lex) {
    std::vector<SentenceStream> streams;
    for (std::size_t i = 0; i < sentences.size(); ++i) streams.push_back(parse_sentence(sentences[i], lex, i + 1));
    Observation o;
    DRS current;
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        MachineConfig c = load({streams[i]}, current);
        c.fresh = fresh;
        try {
            while (!c.control.empty()) c = step(std::move(c));
        } catch (const UnresolvedPronoun& e) {
            o.unresolved_sentence = i + 1;
            o.message = e.what();
            return o;
        }
        current = std::move(c.output);
        fresh = c.fresh;
    }
    o.drs = std::move(current);
    return o;
}

SentenceVerdict sentence_equivalent(const std::string& s1, const std::string& s2,
                                    const std::vector<TextContext>& contexts, const Lexicon& lex) {
    SentenceVerdict v;
    parse_sentence(s1, lex);
    parse_sentence(s2, lex);
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        ++v.contexts_checked;
        Observation a = observe(contexts[i].fill(s1), lex);
        Observation b = observe(contexts[i].fill(s2), lex);
        if (!same_observation(a, b)) {
            v.equivalent = false;
            v.context = i;
            v.first = std::move(a);
            v.second = std::move(b);
            return v;
        }
    }
    return v;
}

}  // namespace dynsem::drt
