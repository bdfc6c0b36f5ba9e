#include <doctest.h>

#include "helpers.hpp"
#include "qfc/error.hpp"

using namespace qfc;
using qfc::testing::make_graph;

namespace {

std::string row(int id, const std::string& form, int head, const std::string& label, const std::string& upos = "X",
                const std::string& lemma = "_") {
  return std::to_string(id) + "\t" + form + "\t" + lemma + "\t" + upos + "\t_\t_\t" + std::to_string(head) + "\t" +
         label + "\t_\t_\n";
}

}  // namespace

TEST_CASE("parse_conllu reads a minimal sentence") {
  const auto graphs = parse_conllu(row(1, "Hi", 0, "root", "INTJ") + row(2, "there", 1, "advmod", "ADV"));
  REQUIRE(graphs.size() == 1);
  const ParseGraph& g = graphs[0];
  CHECK(g.size() == 2);
  CHECK(g.tree_edges().size() == 2);
  CHECK(g.aug_edges().empty());
  CHECK(g.parent(2) == 1);
  CHECK(g.token(1).lemma == "hi");
  CHECK(g.token(2).char_len == 5);
  CHECK(g.id() == "s1");
}

TEST_CASE("parse_conllu splits sentences on blank lines") {
  const std::string text = "# sent_id = a\n" + row(1, "x", 0, "root") + row(2, "y", 1, "dep") + "\n" +
                           "# sent_id = b\n" + row(1, "p", 2, "dep") + row(2, "q", 0, "root") +
                           row(3, "r", 2, "dep") + "\n";
  const auto graphs = parse_conllu(text);
  REQUIRE(graphs.size() == 2);
  CHECK(graphs[0].id() == "a");
  CHECK(graphs[0].size() == 2);
  CHECK(graphs[1].id() == "b");
  CHECK(graphs[1].size() == 3);
}

TEST_CASE("parse_conllu skips multiword ranges and empty nodes") {
  const std::string text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(1, "do", 0, "root") + row(2, "n't", 1, "advmod") +
                           "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n";
  const auto graphs = parse_conllu(text);
  REQUIRE(graphs.size() == 1);
  CHECK(graphs[0].size() == 2);
}

TEST_CASE("parse_conllu rejects HEAD out of range, citing the line") {
  const std::string text = "# sent_id = bad\n" + row(1, "a", 0, "root") + row(2, "b", 9, "dep") + row(3, "c", 1, "dep");
  try {
    parse_conllu(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parse_conllu rejects malformed structure") {
  SUBCASE("wrong column count") {
    try {
      parse_conllu(row(1, "a", 0, "root") + "2\tb\t_\t_\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("cycle") {
    CHECK_THROWS_AS(parse_conllu(row(1, "a", 0, "root") + row(2, "b", 3, "dep") + row(3, "c", 2, "dep")), ParseError);
  }
  SUBCASE("two roots") {
    CHECK_THROWS_AS(parse_conllu(row(1, "a", 0, "root") + row(2, "b", 0, "root")), ParseError);
  }
  SUBCASE("no root") {
    CHECK_THROWS_AS(parse_conllu(row(1, "a", 2, "dep") + row(2, "b", 1, "dep")), ParseError);
  }
  SUBCASE("self loop") { CHECK_THROWS_AS(parse_conllu(row(1, "a", 1, "root")), ParseError); }
  SUBCASE("non-contiguous ids") {
    CHECK_THROWS_AS(parse_conllu(row(1, "a", 0, "root") + row(3, "b", 1, "dep")), ParseError);
  }
}

TEST_CASE("CoNLL-U round trip is the identity on well-formed graphs") {
  std::mt19937_64 rng(11);
  std::vector<ParseGraph> graphs;
  for (int i = 0; i < 20; ++i) graphs.push_back(qfc::testing::random_tree(1 + i % 9, rng, "g" + std::to_string(i)));
  const std::string once = serialize_conllu(graphs);
  const auto back = parse_conllu(once);
  REQUIRE(back.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(back[i].id() == graphs[i].id());
    CHECK(back[i].tree_edges() == graphs[i].tree_edges());
    for (Position v = 1; v <= graphs[i].size(); ++v) {
      CHECK(back[i].token(v).form == graphs[i].token(v).form);
      CHECK(back[i].token(v).lemma == graphs[i].token(v).lemma);
      CHECK(back[i].token(v).upos == graphs[i].token(v).upos);
    }
  }
  CHECK(serialize_conllu(back) == once);
}

TEST_CASE("transform_root_edges") {
  SUBCASE("3-token chain rooted at token 1 gains edges to 2 and 3") {
    const ParseGraph g = make_graph({{"a", 0}, {"b", 1}, {"c", 2}});
    const ParseGraph t = transform_root_edges(g);
    REQUIRE(t.aug_edges().size() == 2);
    CHECK(t.aug_edges()[0] == DepEdge{0, 2, "root_aug", EdgeOrigin::root_augmented});
    CHECK(t.aug_edges()[1] == DepEdge{0, 3, "root_aug", EdgeOrigin::root_augmented});
    CHECK(t.tree_edges() == g.tree_edges());
    CHECK(t.transformed());
    CHECK_FALSE(t.has_aug_edge(1));
    CHECK(t.has_aug_edge(3));
  }
  SUBCASE("1-token sentence gains nothing") {
    const ParseGraph t = transform_root_edges(make_graph({{"a", 0}}));
    CHECK(t.aug_edges().empty());
    CHECK(t.transformed());
  }
  SUBCASE("second application is an error") {
    const ParseGraph t = transform_root_edges(make_graph({{"a", 0}, {"b", 1}}));
    CHECK_THROWS_AS(transform_root_edges(t), ContractError);
  }
  SUBCASE("aug edges plus root tree edges cover every token") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
      const ParseGraph g = qfc::testing::random_tree(1 + i % 12, rng);
      const ParseGraph t = transform_root_edges(g);
      std::size_t from_root = 0;
      for (const DepEdge& e : t.tree_edges()) from_root += e.head == kRoot;
      CHECK(t.aug_edges().size() + from_root == static_cast<std::size_t>(t.size()));
      CHECK(t.tree_edges() == g.tree_edges());
      for (Position v = 1; v <= g.size(); ++v) CHECK(t.token(v).form == g.token(v).form);
    }
  }
}

TEST_CASE("relabel_function_edges") {
  SUBCASE("lives in Paris") {
    const ParseGraph g =
        make_graph({{"lives", 0, "root", "VERB"}, {"in", 3, "case", "ADP"}, {"Paris", 1, "nmod", "PROPN"}});
    const ParseGraph r = relabel_function_edges(g);
    CHECK(r.parent_label(3) == "nmod:in");
    CHECK(r.parent_label(2) == "case");
    CHECK(r.parent_label(1) == "root");
  }
  SUBCASE("apples and oranges") {
    const ParseGraph g = make_graph({{"apples", 0, "root"}, {"and", 3, "cc", "CCONJ"}, {"oranges", 1, "conj"}});
    CHECK(relabel_function_edges(g).parent_label(3) == "conj:and");
  }
  SUBCASE("no case or cc edges leaves the graph unchanged") {
    const ParseGraph g = make_graph({{"dogs", 2, "nsubj"}, {"bark", 0, "root", "VERB"}, {"loudly", 2, "advmod"}});
    CHECK(relabel_function_edges(g).tree_edges() == g.tree_edges());
  }
  SUBCASE("applying twice changes nothing more") {
    const ParseGraph g =
        make_graph({{"lives", 0, "root", "VERB"}, {"in", 3, "case", "ADP"}, {"Paris", 1, "nmod", "PROPN"}});
    const ParseGraph once = relabel_function_edges(g);
    CHECK(relabel_function_edges(once).tree_edges() == once.tree_edges());
  }
}

TEST_CASE("linearize") {
  const ParseGraph g = make_graph({{"Hello", 0}, {"world", 1}});
  CHECK(linearize(g, {}).text.empty());
  CHECK(linearize(g, {}).char_len == 0);
  CHECK(linearize(g, {1, 2}).text == "Hello world");
  CHECK(linearize(g, {1, 2}).char_len == 11);
  CHECK(linearize(g, {2}).text == "world");
  CHECK(linearize(g, {2}).char_len == 5);
}

TEST_CASE("lengths count code points") {
  CHECK(utf8_length("caf\xC3\xA9") == 4);
  CHECK(utf8_length("\xE2\x82\xAC" "5") == 2);
  const ParseGraph g = make_graph({{"caf\xC3\xA9", 0}, {"ok", 1}});
  CHECK(g.token(1).char_len == 4);
  CHECK(linear_length(g, {1, 2}) == 7);
  CHECK(g.char_len() == 7);
}

TEST_CASE("adding a vertex grows the length by its width plus one space") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const ParseGraph g = qfc::testing::random_tree(1 + trial % 10, rng);
    VertexSet verts;
    int prev = 0;
    for (Position v = g.size(); v >= 1; --v) {
      if (rng() % 2) continue;
      verts.push_back(v);
      normalize(verts);
      const int len = linear_length(g, verts);
      CHECK(len == prev + g.token(v).char_len + (verts.size() > 1 ? 1 : 0));
      CHECK(len > prev);
      prev = len;
    }
  }
}

TEST_CASE("instance validation") {
  const auto base = [] { return qfc::testing::make_instance(make_graph({{"a", 0}, {"b", 1}, {"c", 1}}), {2}, 5, VertexSet{1, 2}); };
  CHECK_NOTHROW(base().validate());
  Instance i = base();
  i.query = {4};
  CHECK_THROWS_AS(i.validate(), ContractError);
  i = base();
  i.gold = VertexSet{1, 3};
  CHECK_THROWS_AS(i.validate(), ContractError);
  i = base();
  i.budget = 0;
  CHECK_THROWS_AS(i.validate(), ContractError);
}
