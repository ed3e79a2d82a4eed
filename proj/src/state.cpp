#include "buddy/state.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <stdexcept>

namespace buddy {

std::string CombinedCounter::str() const
{
    return "<" + std::to_string(s0) + "," + std::to_string(s1) + ">";
}

std::size_t ExecutionTrace::count(ThreadId tid) const
{
    return static_cast<std::size_t>(std::count(steps.begin(), steps.end(), tid == 0 ? '0' : '1'));
}

bool snapshot_equal(const Snapshot& a, const Snapshot& b)
{
    if (a.variables.size() != b.variables.size() || a.semaphores.size() != b.semaphores.size())
        throw std::invalid_argument("snapshot_equal: snapshots belong to different programs");
    for (std::size_t i = 0; i < a.variables.size(); ++i)
        if (a.variables[i].name != b.variables[i].name)
            throw std::invalid_argument("snapshot_equal: snapshots belong to different programs");

    for (std::size_t i = 0; i < a.variables.size(); ++i)
        if (a.variables[i].value != b.variables[i].value)
            return false;
    return a.output == b.output && a.semaphores == b.semaphores && a.status == b.status;
}

std::string status_code(const ThreadStatus& s)
{
    switch (s.kind) {
    case ThreadStatus::Kind::Runnable: return "R" + std::to_string(s.value);
    case ThreadStatus::Kind::Blocked: return "B" + std::to_string(s.value);
    case ThreadStatus::Kind::Done: return "D";
    }
    return "?";
}

std::string escape_output(std::string_view text)
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (c < 0x20 || c == 0x7f) {
                out += "\\x";
                out += kHex[c >> 4];
                out += kHex[c & 0xf];
            } else {
                out += ch;
            }
        }
    }
    return out;
}

std::string serialize(const Snapshot& s)
{
    std::string out = "vars{";
    for (std::size_t i = 0; i < s.variables.size(); ++i) {
        if (i)
            out += ',';
        out += s.variables[i].name;
        out += '=';
        out += std::to_string(s.variables[i].value);
    }
    out += "};out=\"";
    out += escape_output(s.output);
    out += "\";sems=";
    for (auto sem : s.semaphores)
        out += sem == SemState::Up ? 'U' : 'D';
    out += ";st0=" + status_code(s.status[0]);
    out += ";st1=" + status_code(s.status[1]);
    return out;
}

std::string Digest::hex() const
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (auto b : bytes) {
        out += kHex[b >> 4];
        out += kHex[b & 0xf];
    }
    return out;
}

Digest digest(const Snapshot& s)
{
    const std::string bytes = serialize(s);
    unsigned char full[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), full, &len, EVP_sha256(), nullptr) != 1 || len < 16)
        throw std::runtime_error("digest: SHA-256 computation failed");
    Digest d;
    std::copy_n(full, d.bytes.size(), d.bytes.begin());
    return d;
}

VisitOutcome StateTable::visit(const PartialInterleaving& i)
{
    auto it = entries_.find(i.counter);
    if (it == entries_.end()) {
        StoredEntry e{i.counter, i.trace, i.schedule, std::nullopt, std::nullopt};
        if (digest_mode_)
            e.digest = digest(i.snapshot);
        else
            e.snapshot = i.snapshot;
        entries_.emplace(i.counter, std::move(e));
        return {VisitOutcome::Kind::FirstVisit, nullptr};
    }
    const StoredEntry& stored = it->second;
    bool equal = digest_mode_ ? *stored.digest == digest(i.snapshot) : snapshot_equal(*stored.snapshot, i.snapshot);
    return {equal ? VisitOutcome::Kind::PrunedEqual : VisitOutcome::Kind::Race, &stored};
}

} // namespace buddy
