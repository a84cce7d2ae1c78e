#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Deterministic stand-ins for the primitives the protocol assumes: a hash,
// multi-signatures, a VRF and a local coin. Everything here is a pure
// function of a master seed and the inputs. None of it is secure.
namespace qscale::crypto {

using ProcessId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// VRF output length in bits.
inline constexpr std::size_t vrf_lambda_bits = 256;

struct Hash {
    std::array<std::uint8_t, 32> bytes{};

    static Hash zero() { return {}; }
    bool is_zero() const;
    std::uint64_t word(std::size_t i) const;
    std::string hex() const;
    std::string short_hex() const { return hex().substr(0, 12); }

    auto operator<=>(const Hash&) const = default;
};

struct HashHasher {
    std::size_t operator()(const Hash& h) const noexcept { return static_cast<std::size_t>(h.word(1)); }
};

/// Streaming 256-bit mixing hash.
class Hasher {
public:
    Hasher();

    Hasher& update(ByteView data);
    Hasher& update(std::string_view s);
    Hasher& update(const Hash& h) { return update(ByteView(h.bytes)); }
    Hasher& update_u32(std::uint32_t v);
    Hasher& update_u64(std::uint64_t v);

    Hash digest() const;
    /// First 64 bits of digest(), computed without the other three words.
    std::uint64_t digest64() const;

private:
    void absorb(std::uint64_t word);
    void finish(std::uint64_t (&lanes)[4]) const;

    std::uint64_t lanes_[4];
    std::uint64_t pending_ = 0;
    std::uint32_t pending_len_ = 0;
    std::uint64_t total_len_ = 0;
};

Hash hash_bytes(ByteView data);
Hash hash_string(std::string_view s);

/// 2^64 * prob, saturating; prob >= 1 maps to "always".
struct CoinThreshold {
    std::uint64_t limit = 0;
    bool always = false;

    explicit CoinThreshold(double prob);
    bool accepts(std::uint64_t draw) const { return always || draw < limit; }
};

/// True iff the first 64 bits of H(seed) fall below floor(prob * 2^64).
bool local_coin(ByteView seed, double prob);

/// local_coin(S || j, prob) for many j with the prefix S absorbed once.
class CoinStream {
public:
    CoinStream(const Hash& prefix, double prob);
    bool operator()(ProcessId j) const;

private:
    Hasher base_;
    CoinThreshold threshold_;
};

/// Single or aggregated signature. A single signature is a multi-signature
/// with one signer, so one type serves both.
struct Signature {
    Hash digest;
    std::vector<ProcessId> signers;  // sorted, unique
    Hash tag;

    bool operator==(const Signature&) const = default;
};
using MultiSignature = Signature;

struct VrfOutput {
    Hash value;
    Hash proof;
    ProcessId prover = 0;
    Bytes seed;

    bool operator==(const VrfOutput&) const = default;
};

/// Per-process secrets derived from a master seed. Plays the role of both
/// the secret keys and the public verification keys.
class KeyRing {
public:
    KeyRing(std::uint64_t master_seed, std::uint32_t n);

    std::uint32_t size() const { return static_cast<std::uint32_t>(secrets_.size()); }
    std::uint64_t master_seed() const { return master_seed_; }
    bool contains(ProcessId id) const { return id >= 1 && id <= size(); }

    Signature sign(ProcessId id, const Hash& digest) const;
    Signature sign_message(ProcessId id, ByteView message) const { return sign(id, hash_bytes(message)); }

    bool validate(const Hash& digest, const Signature& sig, std::span<const ProcessId> ids) const;
    bool validate_message(ByteView message, const Signature& sig, std::span<const ProcessId> ids) const
    {
        return validate(hash_bytes(message), sig, ids);
    }
    /// Validates against the signer list carried by the signature itself.
    bool validate(const Hash& digest, const Signature& sig) const { return validate(digest, sig, sig.signers); }

    VrfOutput vrf_prove(ProcessId id, ByteView seed) const;
    bool vrf_verify(ByteView seed, const VrfOutput& out) const;

private:
    Hash signer_tag(ProcessId id, const Hash& digest) const;
    std::uint64_t secret(ProcessId id) const;

    std::uint64_t master_seed_;
    std::vector<std::uint64_t> secrets_;
};

/// Combines signatures over one digest; duplicates by signer collapse.
/// Throws std::invalid_argument on an empty list or mixed digests.
MultiSignature aggregate(std::span<const Signature> sigs);

/// Seed helpers used by the protocol: e || "propose", round number, etc.
Bytes seed_of(std::uint64_t number);
Bytes seed_of(std::uint64_t number, std::string_view label);

}  // namespace qscale::crypto
