#include "mbgp/lg_parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace mbgp::lg {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

// Strips decoration like commas, parens and pipes off a token before
// interpreting it.
std::string clean(std::string t) {
    auto junk = [](char c) {
        return c == ',' || c == ';' || c == '(' || c == ')' || c == '[' || c == ']' ||
               c == '<' || c == '>' || c == '|' || c == '*' || c == '"';
    };
    while (!t.empty() && junk(t.front())) t.erase(t.begin());
    while (!t.empty() && junk(t.back())) t.pop_back();
    return t;
}

std::optional<uint32_t> parse_asn(const std::string& tok) {
    if (tok.empty()) return std::nullopt;
    uint64_t v = 0;
    auto [next, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || next != tok.data() + tok.size()) return std::nullopt;
    if (v == 0 || v > 0xffffffffull) return std::nullopt;
    return uint32_t(v);
}

std::optional<int64_t> parse_int(const std::string& tok) {
    if (tok.empty()) return std::nullopt;
    int64_t v = 0;
    auto [next, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || next != tok.data() + tok.size()) return std::nullopt;
    return v;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// "LocPrf:" -> "locprf" plus the inline value when written as "locprf:100".
std::pair<std::string, std::optional<int64_t>> label_of(const std::string& tok) {
    std::string t = lower(clean(tok));
    auto sep = t.find_first_of(":=");
    std::optional<int64_t> inline_value;
    if (sep != std::string::npos) {
        inline_value = parse_int(t.substr(sep + 1));
        t = t.substr(0, sep);
    }
    return {t, inline_value};
}

bool is_status_letters(const std::string& tok) {
    // "M,E" / "B,E" style: single uppercase letters separated by commas.
    if (tok.empty()) return false;
    for (size_t i = 0; i < tok.size(); i++) {
        if (i % 2 == 0) {
            if (!std::isupper(static_cast<unsigned char>(tok[i]))) return false;
        } else if (tok[i] != ',') {
            return false;
        }
    }
    return true;
}

}  // namespace

SummaryParse parse_bgp_summary(const std::string& text) {
    SummaryParse out;
    for (const auto& line : split_lines(text)) {
        auto toks = tokens_of(line);
        if (toks.empty()) continue;

        bool parsed = false;
        for (size_t i = 0; i + 1 < toks.size(); i++) {
            auto addr = Ipv4::parse(clean(toks[i]));
            if (!addr) continue;
            size_t as_idx = i + 1;
            auto asn = parse_asn(clean(toks[as_idx]));
            // Cisco-style tables put the BGP version column between the
            // neighbor address and the ASN.
            if (asn && (*asn == 4 || *asn == 6) && as_idx + 1 < toks.size()) {
                if (auto next = parse_asn(clean(toks[as_idx + 1]))) {
                    asn = next;
                    as_idx++;
                }
            }
            if (!asn) continue;

            BgpSummaryEntry e;
            e.neighbor_address = *addr;
            e.neighbor_as = *asn;
            if (as_idx + 1 < toks.size()) e.state_or_prefix_count = toks[as_idx + 1];
            if (as_idx + 2 < toks.size()) e.uptime = toks[as_idx + 2];
            for (size_t j = as_idx + 3; j < toks.size(); j++)
                e.extras["col" + std::to_string(j - i + 1)] = toks[j];
            out.entries.push_back(std::move(e));
            parsed = true;
            break;
        }
        if (!parsed) {
            out.skipped++;
            if (out.skipped_sample.size() < 3) out.skipped_sample.push_back(line);
        }
    }
    if (out.entries.empty()) {
        std::string msg = "unrecognized summary format";
        for (const auto& s : out.skipped_sample) msg += "\n  | " + s;
        throw Error(Errc::UnrecognizedSummaryFormat, msg);
    }
    return out;
}

namespace {

struct BlockBuilder {
    std::optional<Prefix> context_prefix;  // shared header prefix, if any
    RouteDetailRecord cur;
    bool has_prefix = false;
    bool has_next_hop = false;
    bool has_path = false;
    std::string raw;

    void reset() {
        cur = RouteDetailRecord{};
        has_prefix = has_next_hop = has_path = false;
        raw.clear();
    }

    void flush(RouteDetailParse& out) {
        if (has_next_hop && !cur.status_codes.empty()) {
            if (!has_prefix && context_prefix) {
                cur.prefix = *context_prefix;
                has_prefix = true;
            }
            if (has_prefix) {
                cur.raw_block = raw;
                out.records.push_back(cur);
            } else {
                out.skipped_blocks++;
            }
        } else if (has_next_hop || has_path || !cur.status_codes.empty()) {
            out.skipped_blocks++;
        }
        reset();
    }
};

const char* kStatusWords[][2] = {
    {"multipath", "M"}, {"external", "E"}, {"internal", "I"}, {"best", "B"},
};

}  // namespace

RouteDetailParse parse_route_detail(const std::string& text) {
    RouteDetailParse out;
    BlockBuilder b;

    for (const auto& line : split_lines(text)) {
        auto toks = tokens_of(line);
        if (toks.empty()) {  // blank line ends the block
            b.flush(out);
            continue;
        }

        // Pre-scan the line for events that start a new route block: an
        // explicit Prefix label, a fresh next hop, or a fresh AS-path line.
        std::optional<Ipv4> line_next_hop;
        std::optional<Prefix> line_prefix;
        bool labelled_next_hop = false;
        for (size_t i = 0; i < toks.size(); i++) {
            std::string c = clean(toks[i]);
            if (!line_prefix) {
                if (auto p = Prefix::parse(c)) line_prefix = p;
            }
            auto [label, inline_val] = label_of(toks[i]);
            (void)inline_val;
            if (label == "nexthop" || label == "next-hop" || label == "next_hop") {
                if (i + 1 < toks.size()) {
                    if (auto a = Ipv4::parse(clean(toks[i + 1]))) {
                        line_next_hop = a;
                        labelled_next_hop = true;
                    }
                }
            }
            if (!line_next_hop && !labelled_next_hop) {
                if (auto a = Ipv4::parse(c)) line_next_hop = a;
            }
        }

        std::vector<uint32_t> line_path;
        bool all_ints = true;
        for (const auto& t : toks) {
            auto asn = parse_asn(clean(t));
            if (!asn) {
                all_ints = false;
                break;
            }
            line_path.push_back(*asn);
        }
        if (!all_ints) line_path.clear();

        if ((line_prefix && b.has_next_hop) || (line_next_hop && b.has_next_hop) ||
            (!line_path.empty() && b.has_path)) {
            b.flush(out);
        }

        b.raw += line;
        b.raw += '\n';

        if (line_prefix) {
            b.cur.prefix = *line_prefix;
            b.has_prefix = true;
            b.context_prefix = line_prefix;
        }
        if (line_next_hop && !b.has_next_hop) {
            b.cur.next_hop = *line_next_hop;
            b.has_next_hop = true;
        }
        if (!line_path.empty() && !b.has_path) {
            b.cur.as_path = line_path;
            b.has_path = true;
        }

        for (size_t i = 0; i < toks.size(); i++) {
            auto [label, inline_val] = label_of(toks[i]);
            auto value_after = [&]() -> std::optional<int64_t> {
                if (inline_val) return inline_val;
                if (i + 1 < toks.size()) return parse_int(clean(toks[i + 1]));
                return std::nullopt;
            };
            if (label == "locprf" || label == "localpref" || label == "locpref" ||
                label == "local-pref" || label == "local_pref") {
                if (auto v = value_after()) b.cur.loc_pref = v;
            } else if (label == "weight") {
                if (auto v = value_after()) b.cur.weight = v;
            } else if (label == "med" || label == "metric") {
                if (auto v = value_after()) b.cur.med = v;
            } else if (label == "status") {
                if (inline_val) continue;
                if (i + 1 < toks.size()) {
                    std::string codes = clean(toks[i + 1]);
                    if (is_status_letters(codes))
                        for (char ch : codes)
                            if (ch != ',') b.cur.status_codes.insert(ch);
                }
            } else if (label == "path" || label == "aspath" || label == "as-path") {
                std::vector<uint32_t> path;
                for (size_t j = i + 1; j < toks.size(); j++) {
                    auto asn = parse_asn(clean(toks[j]));
                    if (!asn) break;
                    path.push_back(*asn);
                }
                if (!path.empty()) {
                    b.cur.as_path = path;
                    b.has_path = true;
                }
            } else {
                for (auto& [word, code] : kStatusWords)
                    if (label == word) b.cur.status_codes.insert(code[0]);
            }
        }
    }
    b.flush(out);

    if (out.records.empty())
        throw Error(Errc::NoRoutesInResponse, "no routes in response");
    return out;
}

std::optional<MbgpEvidence> detect_mbgp(const std::vector<RouteDetailRecord>& records,
                                        const std::string& router, uint32_t peering_as) {
    if (records.empty()) return std::nullopt;
    for (const auto& r : records)
        if (r.prefix != records.front().prefix)
            throw Error(Errc::MixedPrefixes, "mixed prefixes");

    auto has = [](const RouteDetailRecord& r, char c) {
        return r.status_codes.count(c) > 0;
    };

    std::vector<const RouteDetailRecord*> counted;
    for (const auto& r : records)
        if (has(r, 'M') && has(r, 'E')) counted.push_back(&r);
    if (counted.empty()) return std::nullopt;

    auto ties_counted = [&](const RouteDetailRecord& r) {
        for (const auto* m : counted) {
            if (r.loc_pref && m->loc_pref && *r.loc_pref != *m->loc_pref) return false;
            if (r.weight && m->weight && *r.weight != *m->weight) return false;
            if (!r.as_path.empty() && !m->as_path.empty() &&
                r.as_path.size() != m->as_path.size())
                return false;
        }
        return true;
    };
    for (const auto& r : records)
        if (!has(r, 'M') && has(r, 'B') && has(r, 'E') && ties_counted(r))
            counted.push_back(&r);

    if (counted.size() < 2) return std::nullopt;

    // Counted records must agree on metrics wherever present and must all
    // lead with the peering AS.
    std::optional<int64_t> lp, w;
    std::optional<size_t> plen;
    for (const auto* r : counted) {
        if (r->as_path.empty() || r->as_path.front() != peering_as) return std::nullopt;
        if (r->loc_pref) {
            if (lp && *lp != *r->loc_pref) return std::nullopt;
            lp = r->loc_pref;
        }
        if (r->weight) {
            if (w && *w != *r->weight) return std::nullopt;
            w = r->weight;
        }
        if (plen && *plen != r->as_path.size()) return std::nullopt;
        plen = r->as_path.size();
    }

    std::vector<Ipv4> hops;
    for (const auto* r : counted) hops.push_back(r->next_hop);
    std::sort(hops.begin(), hops.end());
    hops.erase(std::unique(hops.begin(), hops.end()), hops.end());
    if (hops.size() < 2) return std::nullopt;

    MbgpEvidence e;
    e.router = router;
    e.peering_as = peering_as;
    e.prefix = records.front().prefix;
    e.next_hops = std::move(hops);
    e.link_count = uint32_t(e.next_hops.size());
    return e;
}

}  // namespace mbgp::lg
