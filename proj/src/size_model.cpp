#include "qscale/size_model.hpp"

#include <stdexcept>

namespace qscale {

SizeModel SizeModel::block_payload()
{
    SizeModel m;
    m.name = "block-payload";
    m.header = 0;
    m.int_field = 4;
    m.multisig_base = 0;
    m.signer_bitmap = false;
    m.vrf_value = 0;
    m.vrf_proof = 0;
    m.proposal_signed = false;
    return m;
}

SizeModel SizeModel::by_name(const std::string& name)
{
    if (name == "wire") return wire();
    if (name == "block-payload") return block_payload();
    throw std::invalid_argument("unknown size model '" + name + "'");
}

std::uint64_t SizeModel::multisig(std::uint32_t n) const
{
    return multisig_base + (signer_bitmap ? (static_cast<std::uint64_t>(n) + 7) / 8 : 0);
}

std::uint64_t SizeModel::proposal(std::uint32_t n, std::uint32_t txs_per_block) const
{
    // epoch, height, parent hash, txs, parent certificate, leader VRF, leader signature
    return header + 2ull * int_field + hash + static_cast<std::uint64_t>(tx) * txs_per_block + multisig(n) + vrf()
         + (proposal_signed ? signature : 0);
}

std::uint64_t SizeModel::vote() const
{
    return header + int_field + hash + signature + vrf();
}

std::uint64_t SizeModel::certified(std::uint32_t n) const
{
    return header + int_field + hash + multisig(n);
}

}  // namespace qscale
