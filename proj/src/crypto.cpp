#include "qscale/crypto.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qscale::crypto {

namespace {

constexpr std::uint64_t k_prime[4] = {
    0x9E3779B185EBCA87ULL,
    0xC2B2AE3D27D4EB4FULL,
    0x165667B19E3779F9ULL,
    0xD6E8FEB86659FD93ULL,
};

constexpr std::uint64_t fmix64(std::uint64_t k)
{
    k ^= k >> 33;
    k *= 0xFF51AFD7ED558CCDULL;
    k ^= k >> 33;
    k *= 0xC4CEB9FE1A85EC53ULL;
    k ^= k >> 33;
    return k;
}

void store_le(std::uint8_t* out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

bool Hash::is_zero() const
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::uint64_t Hash::word(std::size_t i) const
{
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[8 * i + static_cast<std::size_t>(b)];
    return v;
}

std::string Hash::hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

Hasher::Hasher() : lanes_{k_prime[0] ^ 0x6A09E667F3BCC908ULL, k_prime[1] ^ 0xBB67AE8584CAA73BULL,
                          k_prime[2] ^ 0x3C6EF372FE94F82BULL, k_prime[3] ^ 0xA54FF53A5F1D36F1ULL}
{
}

void Hasher::absorb(std::uint64_t w)
{
    std::uint64_t a = std::rotl(lanes_[0] ^ (w * k_prime[0]), 31) * k_prime[1];
    std::uint64_t b = std::rotl(lanes_[1] ^ (w * k_prime[2]), 29) * k_prime[3];
    std::uint64_t c = std::rotl(lanes_[2] ^ (w * k_prime[1]), 27) * k_prime[0];
    std::uint64_t d = std::rotl(lanes_[3] ^ (w * k_prime[3]), 33) * k_prime[2];
    lanes_[0] = a + d;
    lanes_[1] = b ^ a;
    lanes_[2] = c + b;
    lanes_[3] = d ^ c;
}

Hasher& Hasher::update(ByteView data)
{
    total_len_ += data.size();
    for (std::uint8_t byte : data) {
        pending_ |= static_cast<std::uint64_t>(byte) << (8 * pending_len_);
        if (++pending_len_ == 8) {
            absorb(pending_);
            pending_ = 0;
            pending_len_ = 0;
        }
    }
    return *this;
}

Hasher& Hasher::update(std::string_view s)
{
    return update(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Hasher& Hasher::update_u32(std::uint32_t v)
{
    std::uint8_t buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return update(ByteView(buf, 4));
}

Hasher& Hasher::update_u64(std::uint64_t v)
{
    std::uint8_t buf[8];
    store_le(buf, v);
    return update(ByteView(buf, 8));
}

void Hasher::finish(std::uint64_t (&lanes)[4]) const
{
    Hasher tmp = *this;
    if (tmp.pending_len_ > 0) tmp.absorb(tmp.pending_);
    tmp.absorb(total_len_ ^ 0x8000000000000000ULL);
    for (int i = 0; i < 4; ++i) lanes[i] = tmp.lanes_[i];
}

Hash Hasher::digest() const
{
    std::uint64_t l[4];
    finish(l);
    Hash h;
    for (int k = 0; k < 4; ++k)
        store_le(h.bytes.data() + 8 * k, fmix64(l[k] ^ std::rotl(l[(k + 1) & 3], 29) ^ (total_len_ * k_prime[k])));
    return h;
}

std::uint64_t Hasher::digest64() const
{
    std::uint64_t l[4];
    finish(l);
    return fmix64(l[0] ^ std::rotl(l[1], 29) ^ (total_len_ * k_prime[0]));
}

Hash hash_bytes(ByteView data)
{
    return Hasher().update(data).digest();
}

Hash hash_string(std::string_view s)
{
    return Hasher().update(s).digest();
}

CoinThreshold::CoinThreshold(double prob)
{
    if (!(prob > 0.0)) {
        limit = 0;
    } else if (prob >= 1.0) {
        always = true;
    } else {
        // floor(prob * 2^64); prob < 1 so the product fits
        limit = static_cast<std::uint64_t>(std::ldexp(prob, 64));
    }
}

bool local_coin(ByteView seed, double prob)
{
    return CoinThreshold(prob).accepts(Hasher().update(seed).digest64());
}

CoinStream::CoinStream(const Hash& prefix, double prob) : threshold_(prob)
{
    base_.update(prefix);
}

bool CoinStream::operator()(ProcessId j) const
{
    if (threshold_.always) return true;
    if (threshold_.limit == 0) return false;
    Hasher h = base_;
    h.update_u32(j);
    return threshold_.accepts(h.digest64());
}

KeyRing::KeyRing(std::uint64_t master_seed, std::uint32_t n) : master_seed_(master_seed), secrets_(n)
{
    for (std::uint32_t i = 0; i < n; ++i)
        secrets_[i] = Hasher().update("qscale/keyring").update_u64(master_seed).update_u32(i + 1).digest64();
}

std::uint64_t KeyRing::secret(ProcessId id) const
{
    if (!contains(id)) throw std::out_of_range("process id " + std::to_string(id) + " outside the key ring");
    return secrets_[id - 1];
}

Hash KeyRing::signer_tag(ProcessId id, const Hash& digest) const
{
    return Hasher().update("sig").update_u64(secret(id)).update_u32(id).update(digest).digest();
}

Signature KeyRing::sign(ProcessId id, const Hash& digest) const
{
    return Signature{digest, {id}, signer_tag(id, digest)};
}

bool KeyRing::validate(const Hash& digest, const Signature& sig, std::span<const ProcessId> ids) const
{
    if (sig.digest != digest || ids.empty()) return false;
    if (ids.size() != sig.signers.size()) return false;
    std::vector<ProcessId> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    if (sorted != sig.signers) return false;

    Hash expected;
    for (ProcessId id : sorted) {
        if (!contains(id)) return false;
        const Hash t = signer_tag(id, digest);
        for (std::size_t b = 0; b < expected.bytes.size(); ++b) expected.bytes[b] ^= t.bytes[b];
    }
    return expected == sig.tag;
}

VrfOutput KeyRing::vrf_prove(ProcessId id, ByteView seed) const
{
    VrfOutput out;
    out.prover = id;
    out.seed.assign(seed.begin(), seed.end());
    out.value = Hasher().update("vrf").update_u64(secret(id)).update_u32(id).update(seed).digest();
    out.proof = Hasher().update("vrf-proof").update_u64(secret(id)).update(seed).update(out.value).digest();
    return out;
}

bool KeyRing::vrf_verify(ByteView seed, const VrfOutput& out) const
{
    if (!contains(out.prover)) return false;
    if (!std::equal(seed.begin(), seed.end(), out.seed.begin(), out.seed.end())) return false;
    const VrfOutput expected = vrf_prove(out.prover, seed);
    return expected.value == out.value && expected.proof == out.proof;
}

MultiSignature aggregate(std::span<const Signature> sigs)
{
    if (sigs.empty()) throw std::invalid_argument("aggregate: no signatures");
    const Hash& digest = sigs.front().digest;

    // Collect (signer, per-signer contribution). Only single-signer inputs can be
    // split back into contributions; multi-signer inputs are merged as a block.
    MultiSignature out;
    out.digest = digest;
    std::vector<ProcessId> seen;
    for (const auto& s : sigs) {
        if (s.digest != digest) throw std::invalid_argument("aggregate: signatures over different messages");
        bool duplicate = std::all_of(s.signers.begin(), s.signers.end(), [&](ProcessId id) {
            return std::find(seen.begin(), seen.end(), id) != seen.end();
        });
        if (duplicate) continue;
        for (ProcessId id : s.signers)
            if (std::find(seen.begin(), seen.end(), id) != seen.end())
                throw std::invalid_argument("aggregate: overlapping signer sets");
        seen.insert(seen.end(), s.signers.begin(), s.signers.end());
        for (std::size_t b = 0; b < out.tag.bytes.size(); ++b) out.tag.bytes[b] ^= s.tag.bytes[b];
    }
    std::sort(seen.begin(), seen.end());
    out.signers = std::move(seen);
    return out;
}

Bytes seed_of(std::uint64_t number)
{
    Bytes out(8);
    store_le(out.data(), number);
    return out;
}

Bytes seed_of(std::uint64_t number, std::string_view label)
{
    Bytes out = seed_of(number);
    out.insert(out.end(), label.begin(), label.end());
    return out;
}

}  // namespace qscale::crypto
