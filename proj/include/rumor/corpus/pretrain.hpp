#pragma once
// Loaders for the external pretraining corpora.
//
// Hedge (certainty) corpus: CoNLL-2010 XML (<sentence certainty="...">) or a
// delimited table with `text` and `certainty`/`label` columns.
// Deception corpus: delimited table with `text` and `deceptive`/`label`
// columns holding truthful/deceptive.
// Agreement corpus: delimited table with `sentence1`, `sentence2` and
// `label` columns holding agree/disagree.
//
// Delimited tables have a header row; `.tsv` files split on tabs, anything
// else is read as RFC-4180 CSV.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rumor/core/errors.hpp"
#include "rumor/core/labels.hpp"

namespace rumor::corpus {

template <typename Label>
struct LabeledText {
    std::string text;
    Label label;
};

struct LabeledPair {
    std::string first;
    std::string second;
    Stance label = Stance::None;
};

using HedgeCorpus = std::vector<LabeledText<Certainty>>;
using DeceptionCorpus = std::vector<LabeledText<Veracity>>;
using AgreementCorpus = std::vector<LabeledPair>;

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusFormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

using Row = std::vector<std::string>;

// Quoted fields may contain delimiters, doubled quotes and newlines.
inline std::vector<Row> parse_delimited(std::string_view data, char delim) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == delim) {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field.push_back(c);
            any = true;
        }
    }
    if (quoted) throw CorpusFormatError("unterminated quoted field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

// Header-indexed view over a delimited file.
class Table {
public:
    static Table load(const std::filesystem::path& path) {
        const char delim = path.extension() == ".tsv" ? '\t' : ',';
        Table t;
        t.source_ = path.string();
        auto rows = parse_delimited(detail::read_file(path), delim);
        if (rows.empty()) throw CorpusFormatError("empty table " + t.source_);
        for (const auto& h : rows.front()) t.header_.push_back(detail::lower(detail::trim(h)));
        t.rows_.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
        return t;
    }

    // Index of the first header matching any candidate name.
    std::size_t column(std::initializer_list<std::string_view> names) const {
        for (auto name : names)
            for (std::size_t i = 0; i < header_.size(); ++i)
                if (header_[i] == name) return i;
        std::string wanted;
        for (auto name : names) wanted += (wanted.empty() ? "" : "/") + std::string(name);
        throw CorpusFormatError(source_ + ": missing column " + wanted);
    }

    const std::string& cell(const Row& row, std::size_t col, std::size_t rowno) const {
        if (col >= row.size())
            throw CorpusFormatError(source_ + ": row " + std::to_string(rowno + 2) + " is short");
        return row[col];
    }

    const std::vector<Row>& rows() const { return rows_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

// The five predefined XML entities; anything else passes through.
inline std::string decode_xml_entities(std::string_view s) {
    static constexpr std::pair<std::string_view, char> kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        bool matched = false;
        if (s[i] == '&')
            for (const auto& [name, ch] : kEntities)
                if (s.substr(i, name.size()) == name) {
                    out.push_back(ch);
                    i += name.size();
                    matched = true;
                    break;
                }
        if (!matched) out.push_back(s[i++]);
    }
    return out;
}

inline HedgeCorpus parse_conll_hedge_xml(std::string_view xml) {
    HedgeCorpus out;
    std::size_t pos = 0;
    while ((pos = xml.find("<sentence", pos)) != std::string_view::npos) {
        const std::size_t after_name = pos + 9;
        if (after_name < xml.size() && xml[after_name] != '>' && xml[after_name] != ' ' &&
            xml[after_name] != '\t' && xml[after_name] != '\n') {
            pos = after_name;  // e.g. <sentences>
            continue;
        }
        const std::size_t open_end = xml.find('>', pos);
        const std::size_t close = xml.find("</sentence>", pos);
        if (open_end == std::string_view::npos || close == std::string_view::npos || close < open_end)
            throw CorpusFormatError("unterminated <sentence> element");
        const std::string_view attrs = xml.substr(after_name, open_end - after_name);

        // Some releases mark only uncertain sentences; absence means certain.
        Certainty label = Certainty::Certain;
        if (auto a = attrs.find("certainty"); a != std::string_view::npos) {
            const auto q1 = attrs.find('"', a);
            const auto q2 = q1 == std::string_view::npos ? q1 : attrs.find('"', q1 + 1);
            if (q2 == std::string_view::npos) throw CorpusFormatError("malformed certainty attribute");
            label = require_label<Certainty>(detail::lower(attrs.substr(q1 + 1, q2 - q1 - 1)), parse_certainty,
                                             "certainty");
        }

        std::string text;
        bool in_tag = false;
        for (char c : xml.substr(open_end + 1, close - open_end - 1)) {
            if (c == '<') in_tag = true;
            else if (c == '>') in_tag = false;
            else if (!in_tag) text.push_back(c);
        }
        out.push_back({detail::trim(decode_xml_entities(text)), label});
        pos = close + 11;
    }
    return out;
}

inline HedgeCorpus load_hedge_corpus(const std::filesystem::path& path) {
    if (path.extension() == ".xml") return parse_conll_hedge_xml(detail::read_file(path));
    const Table t = Table::load(path);
    const auto text = t.column({"text", "sentence"});
    const auto label = t.column({"certainty", "label"});
    HedgeCorpus out;
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const auto& r = t.rows()[i];
        out.push_back({t.cell(r, text, i),
                       require_label<Certainty>(detail::lower(detail::trim(t.cell(r, label, i))),
                                                parse_certainty, "certainty")});
    }
    return out;
}

// truthful -> true, deceptive -> false.
inline std::optional<Veracity> parse_deception_label(std::string_view s) {
    const std::string v = detail::lower(detail::trim(s));
    if (v == "truthful" || v == "true" || v == "t") return Veracity::True;
    if (v == "deceptive" || v == "false" || v == "d") return Veracity::False;
    return std::nullopt;
}

inline DeceptionCorpus load_deception_corpus(const std::filesystem::path& path) {
    const Table t = Table::load(path);
    const auto text = t.column({"text", "review"});
    const auto label = t.column({"deceptive", "label"});
    DeceptionCorpus out;
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const auto& r = t.rows()[i];
        out.push_back({t.cell(r, text, i),
                       require_label<Veracity>(t.cell(r, label, i), parse_deception_label, "deception")});
    }
    return out;
}

inline AgreementCorpus load_agreement_corpus(const std::filesystem::path& path) {
    const Table t = Table::load(path);
    const auto s1 = t.column({"sentence1", "quote", "text_a"});
    const auto s2 = t.column({"sentence2", "response", "text_b"});
    const auto label = t.column({"label", "stance"});
    AgreementCorpus out;
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const auto& r = t.rows()[i];
        out.push_back({t.cell(r, s1, i), t.cell(r, s2, i),
                       require_label<Stance>(detail::lower(detail::trim(t.cell(r, label, i))), parse_stance,
                                             "stance")});
    }
    return out;
}

}  // namespace rumor::corpus
