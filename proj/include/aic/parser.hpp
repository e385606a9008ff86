#pragma once

// Reaction file grammar (one statement per line, '#' starts a comment):
//
//   statement := 'species' IDENT+
//              | 'actuated' IDENT
//              | 'regulated' IDENT
//              | [IDENT ':'] side '->' side '@' rate
//   side      := '0' | term ('+' term)*
//   term      := [INT] IDENT                  e.g. "2 A" is A + A
//   rate      := NUMBER
//              | 'hill' '(' NUMBER ',' NUMBER ',' INT ',' IDENT ')'   alpha, K, n, input
//
// Species are indexed in order of first appearance. Without directives the
// actuated species is the first declared species and the regulated one the last.

#include <charconv>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "aic/errors.hpp"
#include "aic/network.hpp"

namespace aic {

namespace detail {

class LineScanner {
  public:
    LineScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
            ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool accept(std::string_view tok) {
        skip_space();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!accept(tok))
            fail("expected '" + std::string(tok) + "'");
    }
    std::optional<std::string> identifier() {
        skip_space();
        auto start = pos_;
        auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
        auto digit = [](char c) { return c >= '0' && c <= '9'; };
        if (pos_ >= text_.size() || !alpha(text_[pos_]))
            return std::nullopt;
        while (pos_ < text_.size() && (alpha(text_[pos_]) || digit(text_[pos_])))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }
    std::string expect_identifier() {
        auto id = identifier();
        if (!id)
            fail("expected a species identifier");
        return *id;
    }
    std::optional<long> integer() {
        skip_space();
        long value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc())
            return std::nullopt;
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }
    double number() {
        skip_space();
        double value = 0;
        const char* first = text_.data() + pos_;
        if (pos_ < text_.size() && text_[pos_] == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
        if (ec != std::errc())
            fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }
    std::size_t column() const { return pos_ + 1; }
    std::size_t position() const { return pos_; }
    void rewind(std::size_t pos) { pos_ = pos; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, pos_ + 1, what); }
    [[noreturn]] void fail_at(std::size_t pos, const std::string& what) const {
        throw ParseError(line_, pos + 1, what);
    }

  private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

struct PendingReaction {
    std::vector<std::string> reactants;
    std::vector<std::string> products;
    std::variant<MassAction, std::pair<RepressingHill, std::string>> kind;
    std::string label;
    std::size_t line;
};

inline std::vector<std::string> parse_side(LineScanner& s) {
    std::vector<std::string> names;
    // '0' alone denotes the empty complex
    auto save = s.position();
    if (s.accept("0")) {
        char next = s.peek();
        if (next == '-' || next == '@' || next == '\0')
            return names;
        s.rewind(save);
    }
    do {
        long mult = 1;
        auto pos = s.position();
        if (auto n = s.integer()) {
            if (*n < 1)
                s.fail_at(pos, "multiplicity must be a positive integer");
            mult = *n;
        }
        auto id = s.expect_identifier();
        for (long m = 0; m < mult; ++m)
            names.push_back(id);
    } while (s.accept("+"));
    return names;
}

} // namespace detail

inline ReactionNetwork parse_network(std::string_view text) {
    SpeciesTable table;
    std::vector<std::string> declared;
    std::vector<detail::PendingReaction> pending;
    std::optional<std::pair<std::string, std::size_t>> actuated, regulated;

    auto touch = [&](const std::string& name) {
        if (!table.index_of(name))
            table.add(name);
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        auto line = text.substr(start, end - start);
        start = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        detail::LineScanner s(line, line_no);
        if (s.at_end())
            continue;

        if (line.find("->") == std::string_view::npos) {
            auto pos = s.position();
            auto word = s.identifier();
            if (!word)
                s.fail("expected a directive or a reaction");
            if (*word == "species") {
                if (s.at_end())
                    s.fail("'species' needs at least one identifier");
                while (!s.at_end()) {
                    auto id_pos = s.position();
                    auto id = s.expect_identifier();
                    if (table.index_of(id))
                        s.fail_at(id_pos, "species '" + id + "' declared twice");
                    table.add(id);
                    declared.push_back(id);
                }
            } else if (*word == "actuated" || *word == "regulated") {
                auto id = s.expect_identifier();
                if (!s.at_end())
                    s.fail("unexpected trailing input");
                (*word == "actuated" ? actuated : regulated) = std::pair{id, line_no};
            } else {
                s.fail_at(pos, "unknown directive '" + *word + "'");
            }
            continue;
        }

        detail::PendingReaction r;
        r.line = line_no;
        {
            auto save = s.position();
            auto id = s.identifier();
            if (id && s.accept(":"))
                r.label = *id;
            else
                s.rewind(save);
        }
        r.reactants = detail::parse_side(s);
        s.expect("->");
        r.products = detail::parse_side(s);
        s.expect("@");
        s.skip_space();
        auto rate_pos = s.position();
        auto save = s.position();
        auto word = s.identifier();
        if (word && *word == "hill") {
            s.expect("(");
            RepressingHill h;
            h.alpha = s.number();
            s.expect(",");
            h.K = s.number();
            s.expect(",");
            auto n_pos = s.position();
            auto n = s.integer();
            if (!n || *n < 1)
                s.fail_at(n_pos, "Hill exponent must be a positive integer");
            h.n = static_cast<int>(*n);
            s.expect(",");
            auto input = s.expect_identifier();
            s.expect(")");
            if (!(h.alpha >= 0.0) || !(h.K > 0.0))
                s.fail_at(rate_pos, "Hill parameters need alpha >= 0 and K > 0");
            if (!r.reactants.empty())
                s.fail_at(rate_pos, "Hill kinetics is only allowed on a reaction with no reactants");
            r.kind = std::pair{h, input};
        } else {
            if (word)
                s.fail_at(save, "unknown rate law '" + *word + "'");
            double c = s.number();
            if (c < 0.0)
                s.fail_at(rate_pos, "negative rate constant");
            if (!std::isfinite(c))
                s.fail_at(rate_pos, "rate constant must be finite");
            r.kind = MassAction{c};
        }
        if (!s.at_end())
            s.fail("unexpected trailing input");
        if (r.reactants.size() > 2)
            throw ParseError(line_no, 1, "at most two reactants are supported");
        for (auto& n : r.reactants)
            touch(n);
        for (auto& n : r.products)
            touch(n);
        if (auto* h = std::get_if<1>(&r.kind))
            touch(h->second);
        pending.push_back(std::move(r));
    }

    if (pending.empty())
        throw ParseError(line_no, 1, "network has no reactions");

    std::vector<Reaction> reactions;
    for (auto& p : pending) {
        Reaction r;
        r.label = p.label;
        for (auto& n : p.reactants)
            r.reactants.push_back(*table.index_of(n));
        for (auto& n : p.products)
            r.products.push_back(*table.index_of(n));
        if (auto* ma = std::get_if<MassAction>(&p.kind)) {
            r.kind = *ma;
        } else {
            auto [h, input] = std::get<1>(p.kind);
            h.input = *table.index_of(input);
            r.kind = h;
        }
        reactions.push_back(std::move(r));
    }

    auto resolve = [&](const std::optional<std::pair<std::string, std::size_t>>& d,
                       std::size_t fallback) -> std::size_t {
        if (!d)
            return fallback;
        auto idx = table.index_of(d->first);
        if (!idx)
            throw ParseError(d->second, 1, "unknown species '" + d->first + "'");
        return *idx;
    };
    const std::size_t first = declared.empty() ? 0 : *table.index_of(declared.front());
    const std::size_t last = declared.empty() ? table.size() - 1 : *table.index_of(declared.back());
    return ReactionNetwork(table, std::move(reactions), resolve(actuated, first), resolve(regulated, last));
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string render_side(const SpeciesTable& t, const std::vector<std::size_t>& side) {
    if (side.empty())
        return "0";
    std::string out;
    for (std::size_t i = 0; i < side.size();) {
        std::size_t j = i;
        while (j < side.size() && side[j] == side[i])
            ++j;
        if (!out.empty())
            out += " + ";
        if (j - i > 1)
            out += std::to_string(j - i) + " ";
        out += t[side[i]];
        i = j;
    }
    return out;
}

} // namespace detail

/// Text form of a network that parse_network reads back to an equal network.
inline std::string render_network(const ReactionNetwork& net) {
    std::ostringstream os;
    const auto& t = net.species();
    os << "species";
    for (const auto& n : t.names())
        os << ' ' << n;
    os << "\nactuated " << t[net.actuated()] << "\nregulated " << t[net.regulated()] << '\n';
    for (const auto& r : net.reactions()) {
        if (!r.label.empty())
            os << r.label << ": ";
        os << detail::render_side(t, r.reactants) << " -> " << detail::render_side(t, r.products) << " @ ";
        if (const auto* ma = std::get_if<MassAction>(&r.kind)) {
            os << detail::format_double(ma->rate);
        } else {
            const auto& h = std::get<RepressingHill>(r.kind);
            os << "hill(" << detail::format_double(h.alpha) << ", " << detail::format_double(h.K) << ", "
               << h.n << ", " << t[h.input] << ')';
        }
        os << '\n';
    }
    return os.str();
}

} // namespace aic
