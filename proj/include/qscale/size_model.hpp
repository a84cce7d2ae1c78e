#pragma once

#include <cstdint>
#include <string>

namespace qscale {

/// Byte accounting for protocol messages. Sizes are not derived from the
/// encoder; they are a declared model so totals can be compared across
/// implementations.
struct SizeModel {
    std::string name = "wire";
    std::uint32_t header = 16;
    std::uint32_t int_field = 8;
    std::uint32_t hash = 32;
    std::uint32_t signature = 48;
    std::uint32_t multisig_base = 48;
    bool signer_bitmap = true;  // ceil(n/8) bytes added to a multi-signature
    std::uint32_t vrf_value = 32;
    std::uint32_t vrf_proof = 80;
    std::uint32_t tx = 250;
    bool proposal_signed = true;

    /// Full wire model: every field a proposal or vote carries.
    static SizeModel wire() { return {}; }

    /// Block payload only: epoch, height, parent hash and transactions for a
    /// proposal; epoch, hash and signature for a vote. Certificates, VRF
    /// proofs and headers are not counted.
    static SizeModel block_payload();

    static SizeModel by_name(const std::string& name);

    std::uint64_t multisig(std::uint32_t n) const;
    std::uint64_t vrf() const { return vrf_value + vrf_proof; }
    std::uint64_t proposal(std::uint32_t n, std::uint32_t txs_per_block) const;
    std::uint64_t vote() const;
    std::uint64_t certified(std::uint32_t n) const;
};

}  // namespace qscale
