#include <filesystem>

#include "doctest.h"

#include "dual/errors.hpp"
#include "dual/nn.hpp"
#include "dual/rng.hpp"
#include "dual/serialize.hpp"

using namespace dual;

namespace {

DualNetwork sample_net(std::uint64_t seed) {
    NetworkDims dims;
    dims.input_dim = 5;
    dims.hidden_widths = {6, 4};
    dims.latent_dim = 3;
    dims.n_samples = 7;
    dims.k_clusters = 2;
    DualNetwork net = init_params(dims, seed);
    // make the coefficient layers non-trivial, including awkward values
    RandomEngine rng(derive_seed(seed, 5));
    for (std::size_t i = 0; i < net.q.size(); ++i)
        net.q.data()[i] = rng.next_uniform(-1.0, 1.0) / 3.0;
    for (std::size_t i = 0; i < net.p.size(); ++i)
        net.p.data()[i] = rng.next_uniform(-1.0, 1.0) * 1e-15;
    net.q(0, 1) = 0.1 + 0.2;  // 0.30000000000000004
    net.p(0, 0) = -0.0;
    net.zero_q_diagonal();
    return net;
}

void check_identical(const DualNetwork& a, const DualNetwork& b) {
    auto pa = a.params();
    auto pb = b.params();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].name == pb[i].name);
        CHECK(*pa[i].value == *pb[i].value);
    }
}

}  // namespace

TEST_CASE("parameter json round trip is bit-exact") {
    const DualNetwork net = sample_net(31);
    const DualNetwork back = params_from_json(params_to_json(net));
    check_identical(net, back);
    CHECK(back.latent_dim == net.latent_dim);
    CHECK(back.encoder.size() == net.encoder.size());
    CHECK(back.decoder.size() == net.decoder.size());
}

TEST_CASE("restored networks follow the activation rule") {
    const DualNetwork net = sample_net(32);
    const DualNetwork back = params_from_json(params_to_json(net));
    for (const auto& l : back.encoder) CHECK(l.activation == Activation::relu);
    for (std::size_t i = 0; i + 1 < back.decoder.size(); ++i)
        CHECK(back.decoder[i].activation == Activation::relu);
    CHECK(back.decoder.back().activation == Activation::identity);
}

TEST_CASE("parameter file round trip through disk is bit-exact") {
    const auto dir = std::filesystem::temp_directory_path() / "dual_unit" / "params";
    std::filesystem::create_directories(dir);
    const auto path = dir / "net.json";
    const DualNetwork net = sample_net(33);
    save_params(net, path);
    const DualNetwork back = load_params(path);
    check_identical(net, back);
}

TEST_CASE("incomplete or corrupt parameter documents are rejected") {
    const DualNetwork net = sample_net(34);
    auto doc = params_to_json(net);
    doc.erase("selection.q");
    CHECK_THROWS_AS(params_from_json(doc), ContractViolation);

    auto doc2 = params_to_json(net);
    doc2["selection.p"]["values"][0] = "not-a-float";
    CHECK_THROWS_AS(params_from_json(doc2), ContractViolation);

    auto doc3 = params_to_json(net);
    doc3["selection.p"]["rows"] = 999;
    CHECK_THROWS_AS(params_from_json(doc3), ContractViolation);
}
