#include "mbgp/tables.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace mbgp {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& s) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path);
    out << s;
    if (!out) throw Error(Errc::Io, "short write to " + path);
}

std::vector<std::string> split_csv(const std::string& line, size_t max_fields) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' && (max_fields == 0 || out.size() + 1 < max_fields)) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

namespace {

std::optional<uint64_t> to_u64(const std::string& s) {
    if (s.empty()) return std::nullopt;
    uint64_t v = 0;
    auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || next != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

bool IxpDataset::add(IxpRecord rec) {
    if (!rec.ixp_prefix.contains(rec.member_ip)) return false;
    by_ip_[rec.member_ip] = records_.size();
    bool known = false;
    for (auto& [p, n] : lans_)
        if (p == rec.ixp_prefix) known = true;
    if (!known) lans_.emplace_back(rec.ixp_prefix, rec.ixp_name);
    records_.push_back(std::move(rec));
    return true;
}

const IxpRecord* IxpDataset::member_by_ip(Ipv4 ip) const {
    auto it = by_ip_.find(ip);
    return it == by_ip_.end() ? nullptr : &records_[it->second];
}

std::optional<std::string> IxpDataset::lan_containing(Ipv4 ip) const {
    const std::pair<Prefix, std::string>* best = nullptr;
    for (const auto& lan : lans_)
        if (lan.first.contains(ip) && (!best || lan.first.len > best->first.len))
            best = &lan;
    if (!best) return std::nullopt;
    return best->second;
}

IxpDataset IxpDataset::from_csv(const std::string& text, size_t* skipped) {
    IxpDataset ds;
    size_t bad = 0;
    for (const auto& line : data_lines(text)) {
        auto f = split_csv(line);
        if (f.size() != 4) {
            bad++;
            continue;
        }
        auto prefix = Prefix::parse(f[1]);
        auto asn = to_u64(f[2]);
        auto ip = Ipv4::parse(f[3]);
        if (!prefix || !asn || *asn == 0 || *asn > 0xffffffffull || !ip) {
            bad++;
            continue;
        }
        if (!ds.add({f[0], *prefix, uint32_t(*asn), *ip})) bad++;
    }
    if (skipped) *skipped = bad;
    return ds;
}

std::string IxpDataset::to_csv() const {
    std::string out = "# ixp_name,ixp_prefix,member_asn,member_ip\n";
    for (const auto& r : records_)
        out += r.ixp_name + "," + r.ixp_prefix.str() + "," + std::to_string(r.member_asn) +
               "," + r.member_ip.str() + "\n";
    return out;
}

std::vector<Prefix> PrefixTable::slash24_of(uint32_t asn) const {
    std::set<Prefix> found;
    for (const auto& [p, origin] : entries)
        if (origin == asn && p.len == 24) found.insert(p);
    return {found.begin(), found.end()};
}

std::optional<uint32_t> PrefixTable::origin_of(Ipv4 ip) const {
    const std::pair<Prefix, uint32_t>* best = nullptr;
    for (const auto& e : entries)
        if (e.first.contains(ip) && (!best || e.first.len > best->first.len)) best = &e;
    if (!best) return std::nullopt;
    return best->second;
}

PrefixTable PrefixTable::from_csv(const std::string& text, size_t* skipped) {
    PrefixTable t;
    size_t bad = 0;
    for (const auto& line : data_lines(text)) {
        auto f = split_csv(line);
        if (f.size() != 2) {
            bad++;
            continue;
        }
        auto prefix = Prefix::parse(f[0]);
        auto asn = to_u64(f[1]);
        if (!prefix || !asn || *asn == 0 || *asn > 0xffffffffull) {
            bad++;
            continue;
        }
        t.entries.emplace_back(*prefix, uint32_t(*asn));
    }
    if (skipped) *skipped = bad;
    return t;
}

std::string PrefixTable::to_csv() const {
    std::string out = "# prefix,origin_asn\n";
    for (const auto& [p, asn] : entries) out += p.str() + "," + std::to_string(asn) + "\n";
    return out;
}

AsRankTable AsRankTable::from_csv(const std::string& text, size_t* skipped) {
    AsRankTable t;
    size_t bad = 0;
    for (const auto& line : data_lines(text)) {
        auto f = split_csv(line, 4);
        if (f.size() != 4) {
            bad++;
            continue;
        }
        auto asn = to_u64(f[0]);
        auto rank = to_u64(f[1]);
        auto cone = to_u64(f[2]);
        if (!asn || *asn == 0 || *asn > 0xffffffffull || !rank || !cone) {
            bad++;
            continue;
        }
        t.by_asn[uint32_t(*asn)] = {uint32_t(*asn), uint32_t(*rank), *cone, f[3]};
    }
    if (skipped) *skipped = bad;
    return t;
}

std::string AsRankTable::to_csv() const {
    std::string out = "# asn,rank,cone_size,name\n";
    for (const auto& [asn, e] : by_asn)
        out += std::to_string(asn) + "," + std::to_string(e.rank) + "," +
               std::to_string(e.cone_size) + "," + e.name + "\n";
    return out;
}

}  // namespace mbgp
