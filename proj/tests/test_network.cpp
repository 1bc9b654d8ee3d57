#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "qsinglet/errors.hpp"
#include "qsinglet/network.hpp"
#include "qsinglet/rng.hpp"

using namespace qsinglet;

TEST_CASE("network json round trip") {
    const std::string text = R"({"num_qudits": 4, "edges": [[1,2,0.5],[2,3,1.5],[3,4,2.0]]})";
    const QuditNetwork net = parse_network(text);
    CHECK(net.num_vertices == 4);
    REQUIRE(net.edges.size() == 3);
    CHECK(net.edges[0].i == 1);
    CHECK(net.edges[0].j == 2);
    CHECK(net.edges[0].coupling == 0.5);
    CHECK(net.coupling_sum() == 4.0);

    const QuditNetwork again = parse_network(serialize_network(net));
    CHECK(again.num_vertices == net.num_vertices);
    REQUIRE(again.edges.size() == net.edges.size());
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        CHECK(again.edges[k].i == net.edges[k].i);
        CHECK(again.edges[k].j == net.edges[k].j);
        CHECK(again.edges[k].coupling == net.edges[k].coupling);
    }
}

TEST_CASE("network schema rejections") {
    CHECK_THROWS_AS(parse_network("not json"), ValidationError);
    CHECK_THROWS_AS(parse_network(R"([1,2,3])"), ValidationError);
    CHECK_THROWS_AS(parse_network(R"({"edges": [[1,2,1.0]]})"), ValidationError);
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2})"), ValidationError);
    CHECK_THROWS_AS(
        parse_network(R"({"num_qudits": 2, "edges": [[1,2,1.0]], "extra": 1})"),
        ValidationError);
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[1,2]]})"), ValidationError);
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[1,1,1.0]]})"),
                    ValidationError);  // self loop
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[1,3,1.0]]})"),
                    ValidationError);  // vertex out of range
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[0,1,1.0]]})"),
                    ValidationError);  // 1-based indices
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[1,2,0.0]]})"),
                    ValidationError);  // antiferromagnetic couplings only
    CHECK_THROWS_AS(parse_network(R"({"num_qudits": 2, "edges": [[1,2,-1.0]]})"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_network(R"({"num_qudits": 3, "edges": [[1,2,1.0],[2,1,2.0],[2,3,1.0]]})"),
        ValidationError);  // duplicate after normalization
}

TEST_CASE("connectivity detection") {
    CHECK(is_connected(parse_network(R"({"num_qudits": 1, "edges": []})")));
    CHECK_FALSE(is_connected(parse_network(R"({"num_qudits": 2, "edges": []})")));
    CHECK(is_connected(parse_network(R"({"num_qudits": 3, "edges": [[1,2,1.0],[2,3,1.0]]})")));
    CHECK_FALSE(is_connected(
        parse_network(R"({"num_qudits": 4, "edges": [[1,2,1.0],[3,4,1.0]]})")));
}

TEST_CASE("topology generators have the right shape") {
    CHECK(make_topology(Topology::chain, 5, 1.0).edges.size() == 4);
    CHECK(make_topology(Topology::ring, 5, 1.0).edges.size() == 5);
    CHECK(make_topology(Topology::star, 5, 1.0).edges.size() == 4);
    CHECK(make_topology(Topology::complete, 5, 1.0).edges.size() == 10);
    CHECK_THROWS_AS(make_topology(Topology::ring, 2, 1.0), DomainError);
    CHECK_THROWS_AS(make_topology(Topology::chain, 1, 1.0), DomainError);

    const QuditNetwork star = make_topology(Topology::star, 4, 2.0);
    for (const Edge& edge : star.edges) {
        CHECK(edge.i == 1);
        CHECK(edge.coupling == 2.0);
    }

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const QuditNetwork random = make_topology(Topology::random_connected, 5, 1.0, seed);
        CHECK(is_connected(random));
        CHECK(random.edges.size() >= 4);
        std::set<std::pair<int, int>> seen;
        for (const Edge& edge : random.edges) {
            CHECK(edge.i < edge.j);
            CHECK(seen.insert({edge.i, edge.j}).second);
        }
    }
}

TEST_CASE("random couplings land in the half-open interval") {
    Rng rng(9);
    QuditNetwork net = make_topology(Topology::complete, 5, 1.0);
    assign_random_couplings(net, rng);
    for (const Edge& edge : net.edges) {
        CHECK(edge.coupling > 0.0);
        CHECK(edge.coupling <= 2.0);
    }
}

TEST_CASE("topology names round trip") {
    for (Topology kind : {Topology::chain, Topology::ring, Topology::star, Topology::complete,
                          Topology::random_connected})
        CHECK(topology_from_name(topology_name(kind)) == kind);
    CHECK(topology_from_name("random") == Topology::random_connected);
    CHECK_THROWS_AS(topology_from_name("lattice"), ValidationError);
}
