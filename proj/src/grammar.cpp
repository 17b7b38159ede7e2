#include "cfx/grammar.hpp"

#include <array>
#include <cctype>
#include <random>
#include <stdexcept>

#include "cfx/error.hpp"

namespace cfx {

namespace {

constexpr std::array<std::string_view, 9> kKeywords = {"go", "to", "pick", "up", "put",
                                                       "next", "the", "a", "then"};

constexpr std::string_view kBnf = R"(<sentence>   ::= <command> | <command> "then" <command>
<command>    ::= "go" "to" <descriptor>
               | "pick" "up" <descriptor>
               | "put" <descriptor> "next" "to" <descriptor>
<descriptor> ::= <article> <color> <kind>
<article>    ::= "the" | "a"
<color>      ::= "blue" | "green" | "grey" | "purple" | "red" | "yellow"
<kind>       ::= "ball" | "box" | "key"
)";

class SentenceParser {
public:
    explicit SentenceParser(const std::vector<std::string>& tokens) : tokens_(tokens) {}

    Program sentence() {
        std::vector<Command> cmds{command()};
        if (pos_ < tokens_.size() && tokens_[pos_] == "then") {
            ++pos_;
            cmds.push_back(command());
        }
        if (pos_ != tokens_.size()) structural_error("expected end of sentence or \"then\"");
        return Program(std::move(cmds));
    }

private:
    [[noreturn]] void structural_error(const std::string& detail) const {
        throw ParseError::structural(pos_, detail);
    }

    bool accept(std::string_view word) {
        if (pos_ < tokens_.size() && tokens_[pos_] == word) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(std::string_view word) {
        if (!accept(word)) structural_error("expected \"" + std::string(word) + "\"");
    }

    Command command() {
        if (accept("go")) {
            expect("to");
            return Command::go_to(descriptor());
        }
        if (accept("pick")) {
            expect("up");
            return Command::pick_up(descriptor());
        }
        if (accept("put")) {
            Descriptor what = descriptor();
            expect("next");
            expect("to");
            return Command::put_next(what, descriptor());
        }
        structural_error("expected \"go\", \"pick\" or \"put\"");
    }

    Descriptor descriptor() {
        if (!accept("the") && !accept("a")) structural_error("expected an article");
        if (pos_ >= tokens_.size()) structural_error("expected a color");
        auto color = color_from_string(tokens_[pos_]);
        if (!color) structural_error("expected a color");
        ++pos_;
        if (pos_ >= tokens_.size()) structural_error("expected an object kind");
        auto kind = kind_from_string(tokens_[pos_]);
        if (!kind) structural_error("expected an object kind");
        ++pos_;
        return {*color, *kind};
    }

    const std::vector<std::string>& tokens_;
    std::size_t pos_ = 0;
};

void append_descriptor(std::vector<std::string>& out, Descriptor d, std::string_view article) {
    out.emplace_back(article);
    out.emplace_back(to_string(d.color));
    out.emplace_back(to_string(d.kind));
}

void append_command(std::vector<std::string>& out, const Command& c,
                    std::string_view first_article, std::string_view second_article) {
    switch (c.kind) {
    case CommandKind::go_to:
        out.insert(out.end(), {"go", "to"});
        append_descriptor(out, c.object, first_article);
        break;
    case CommandKind::pick_up:
        out.insert(out.end(), {"pick", "up"});
        append_descriptor(out, c.object, first_article);
        break;
    case CommandKind::put_next:
        out.emplace_back("put");
        append_descriptor(out, c.object, first_article);
        out.insert(out.end(), {"next", "to"});
        append_descriptor(out, c.target, second_article);
        break;
    }
}

} // namespace

Sentence Sentence::from_text(std::string_view text) {
    Sentence s;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) s.tokens.push_back(std::move(current));
        current.clear();
    };
    for (char ch : text) {
        auto uc = static_cast<unsigned char>(ch);
        if (std::isspace(uc) || std::ispunct(uc)) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    flush();
    if (s.tokens.empty()) throw ParseError::structural(0, "empty utterance");
    return s;
}

std::string Sentence::text() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

bool is_terminal(std::string_view token) {
    for (auto k : kKeywords) {
        if (k == token) return true;
    }
    return color_from_string(token).has_value() || kind_from_string(token).has_value();
}

std::string_view grammar_bnf() { return kBnf; }

std::vector<Sentence> enumerate_sentences(int depth_bound) {
    std::size_t count = program_count(depth_bound);
    std::vector<Sentence> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(unparse(program_at(i)));
    return out;
}

Program parse(const Sentence& s) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        if (!is_terminal(s.tokens[i])) throw ParseError::unknown_token(s.tokens[i], i);
    }
    if (s.tokens.empty()) throw ParseError::structural(0, "empty sentence");
    return SentenceParser(s.tokens).sentence();
}

Sentence unparse(const Program& prog) {
    Sentence s;
    s.tokens.reserve(12);
    bool first = true;
    for (const auto& c : prog.commands()) {
        if (!first) s.tokens.emplace_back("then");
        first = false;
        append_command(s.tokens, c, "the", "the");
    }
    return s;
}

std::vector<std::pair<Sentence, Program>> training_corpus(int n, std::uint64_t seed, int depth_bound) {
    if (n < 1) throw std::invalid_argument("corpus size must be positive");
    std::mt19937_64 rng(seed);
    const std::size_t count = program_count(depth_bound);
    auto article = [&rng]() -> std::string_view { return (rng() & 1U) ? "a" : "the"; };

    std::vector<std::pair<Sentence, Program>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Program prog = program_at(rng() % count);
        Sentence s;
        bool first = true;
        for (const auto& c : prog.commands()) {
            if (!first) s.tokens.emplace_back("then");
            first = false;
            std::string_view a1 = article();
            std::string_view a2 = article();
            append_command(s.tokens, c, a1, a2);
        }
        out.emplace_back(std::move(s), std::move(prog));
    }
    return out;
}

} // namespace cfx
