#include <doctest.h>

#include "qscale/crypto.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

using namespace qscale::crypto;

namespace {

Bytes bytes_of(std::string_view s) { return Bytes(s.begin(), s.end()); }

Bytes with_id(const Hash& prefix, ProcessId j)
{
    Bytes b(prefix.bytes.begin(), prefix.bytes.end());
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(j >> (8 * i)));
    return b;
}

}  // namespace

TEST_CASE("hash is deterministic and input sensitive")
{
    CHECK(hash_string("abc") == hash_string("abc"));
    CHECK(hash_string("abc") != hash_string("abd"));
    CHECK(hash_string("") != hash_string(std::string_view("\0", 1)));
    // length is part of the state: a zero tail does not collide
    CHECK(hash_bytes(Bytes{1, 2, 3}) != hash_bytes(Bytes{1, 2, 3, 0}));
    CHECK(hash_string("abc").hex().size() == 64);

    Hasher h;
    h.update("ab").update("c");
    CHECK(h.digest() == hash_string("abc"));
    CHECK(h.digest64() == h.digest().word(0));
}

TEST_CASE("hash output bits look balanced")
{
    // bit frequency over 4096 inputs, each of 256 bits within 5 sigma of 1/2
    std::vector<int> ones(256, 0);
    const int trials = 4096;
    for (int i = 0; i < trials; ++i) {
        Hasher h;
        h.update_u64(static_cast<std::uint64_t>(i));
        auto d = h.digest();
        for (int b = 0; b < 256; ++b) ones[b] += (d.bytes[b / 8] >> (b % 8)) & 1;
    }
    const double sigma = std::sqrt(trials * 0.25);
    for (int b = 0; b < 256; ++b) CHECK(std::abs(ones[b] - trials / 2.0) < 5 * sigma);
}

TEST_CASE("local coin")
{
    CHECK(local_coin(bytes_of("x"), 1.0));
    CHECK_FALSE(local_coin(bytes_of("x"), 0.0));
    CHECK(local_coin(bytes_of("x"), 2.0));
    CHECK_FALSE(local_coin(bytes_of("x"), -1.0));

    // empirical rate within 4 sigma for a few probabilities
    for (double p : {0.01, 0.134, 0.5, 0.9}) {
        const int trials = 20000;
        int hits = 0;
        for (int i = 0; i < trials; ++i) hits += local_coin(with_id(hash_string("rate"), static_cast<ProcessId>(i)), p);
        const double sigma = std::sqrt(trials * p * (1 - p));
        CHECK(std::abs(hits - trials * p) < 4 * sigma);
    }
}

TEST_CASE("coin stream equals local_coin on the concatenation")
{
    const Hash prefix = hash_string("sample-seed");
    for (double p : {0.0, 0.05, 0.3, 1.0}) {
        CoinStream stream(prefix, p);
        for (ProcessId j = 1; j <= 300; ++j) CHECK(stream(j) == local_coin(with_id(prefix, j), p));
    }
}

TEST_CASE("signatures")
{
    KeyRing keys(7, 10);
    const Hash m = hash_string("proposal");
    auto s3 = keys.sign(3, m);
    CHECK(keys.validate(m, s3));
    std::vector<ProcessId> three{3}, four{4};
    CHECK(keys.validate(m, s3, three));
    CHECK_FALSE(keys.validate(m, s3, four));
    CHECK_FALSE(keys.validate(hash_string("other"), s3));

    // a different master seed yields different keys
    KeyRing other(8, 10);
    CHECK_FALSE(other.validate(m, s3));

    auto forged = s3;
    forged.tag.bytes[0] ^= 1;
    CHECK_FALSE(keys.validate(m, forged));
    CHECK_FALSE(keys.contains(0));
    CHECK_FALSE(keys.contains(11));
}

TEST_CASE("aggregation")
{
    KeyRing keys(1, 20);
    const Hash m = hash_string("block");
    std::vector<Signature> sigs;
    for (ProcessId id : {5u, 2u, 9u}) sigs.push_back(keys.sign(id, m));
    auto agg = aggregate(sigs);
    CHECK(agg.signers == std::vector<ProcessId>{2, 5, 9});
    CHECK(keys.validate(m, agg));
    std::vector<ProcessId> wrong{2, 5, 10};
    CHECK_FALSE(keys.validate(m, agg, wrong));

    // dropping a signer from the list breaks it
    auto cut = agg;
    cut.signers.pop_back();
    CHECK_FALSE(keys.validate(m, cut));

    // exact duplicates collapse
    sigs.push_back(keys.sign(5, m));
    CHECK(aggregate(sigs) == agg);

    std::vector<Signature> mixed{keys.sign(1, m), keys.sign(2, hash_string("x"))};
    CHECK_THROWS_AS(aggregate(mixed), std::invalid_argument);
    CHECK_THROWS_AS(aggregate(std::vector<Signature>{}), std::invalid_argument);

    // aggregates of aggregates
    std::vector<Signature> left{keys.sign(1, m), keys.sign(2, m)}, right{keys.sign(3, m)};
    std::vector<Signature> both{aggregate(left), aggregate(right)};
    CHECK(keys.validate(m, aggregate(both)));
}

TEST_CASE("vrf")
{
    KeyRing keys(3, 8);
    const Bytes seed = seed_of(12, "propose");
    auto out = keys.vrf_prove(4, seed);
    CHECK(out.prover == 4);
    CHECK(keys.vrf_verify(seed, out));
    CHECK(keys.vrf_prove(4, seed) == out);
    CHECK(keys.vrf_prove(5, seed).value != out.value);
    CHECK_FALSE(keys.vrf_verify(seed_of(13, "propose"), out));

    auto bad = out;
    bad.value.bytes[3] ^= 0x10;
    CHECK_FALSE(keys.vrf_verify(seed, bad));
    bad = out;
    bad.prover = 5;
    CHECK_FALSE(keys.vrf_verify(seed, bad));

    CHECK(seed_of(1) != seed_of(2));
    CHECK(seed_of(1, "a") != seed_of(1, "b"));
}
