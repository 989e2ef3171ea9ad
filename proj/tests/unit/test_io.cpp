#include <doctest.h>

#include "../oracle/interval_oracle.hpp"
#include "../oracle/scenarios.hpp"
#include "tempabd/render.hpp"
#include "tempabd/sentence.hpp"

using namespace tempabd;

TEST_CASE("interval semantics on the six-point grid") {
  oracle::GridCheck g = oracle::interval_grid_suite();
  INFO(g.first);
  CHECK(g.cases == 15 * 2 + 15 * 15 * 6);
  CHECK(g.mismatches == 0);
}

TEST_CASE("next_day over 1900-2100") {
  oracle::CalendarCheck c = oracle::calendar_suite(2000, 99);
  INFO(c.first);
  CHECK(c.mismatches == 0);
  CHECK(c.month_ends > 100);
  CHECK(c.year_ends > 5);
  CHECK(c.leap_days > 0);
}

namespace {

const char* kGisteren = R"J({
  "clause": "s1",
  "verbs": [{"token": "w1", "word": "zijn", "form": "past_participle"},
            {"token": "w2", "word": "zijn", "form": "present_tense"}],
  "main_verb": "w1",
  "aux_verbs": [{"aux": "w2", "complement": "w1"}],
  "adjuncts": [{"token": "a1", "word": "gisteren"}],
  "s_adjuncts": ["a1"]
})J";

std::set<std::string> fact_set(const std::vector<Rule>& rules) {
  std::set<std::string> out;
  for (const Rule& r : rules) out.insert(r.head.to_string());
  return out;
}

}  // namespace

TEST_CASE("encoding the gisteren sentence") {
  auto facts = encode_sentence(parse_sentence(kGisteren));
  CHECK(facts.size() == 9);
  CHECK(fact_set(facts) == std::set<std::string>{"verbt_word(w1,zijn)", "verbt_word(w2,zijn)",
                                                 "adjt_word(a1,gisteren)", "vform(w1,past_participle)",
                                                 "vform(w2,present_tense)", "clause(s1)", "main_verb(s1,w1)",
                                                 "aux_verb(w2,w1)", "s_adjunct(s1,a1)"});
  // The text form loads as a theory.
  Theory th = parse_theory(facts_text(facts));
  CHECK(th.is_defined(Symbol("vform")));
}

TEST_CASE("encoding hamburger and na gisteren") {
  auto ham = fact_set(encode_sentence(parse_sentence(R"J({"clause":"s1",
    "verbs":[{"token":"w1","word":"eten","form":"past_participle"},{"token":"w2","word":"hebben","form":"past_tense"}],
    "main_verb":"w1","aux_verbs":[{"aux":"w2","complement":"w1"}],
    "adjuncts":[{"token":"a1","word":"om(4)"}],"s_adjuncts":["a1"]})J")));
  CHECK(ham.contains("adjt_word(a1,om(4))"));
  CHECK(ham.contains("vform(w2,past_tense)"));
  CHECK(ham.size() == 9);

  auto na = fact_set(encode_sentence(parse_sentence(R"J({"clause":"s1",
    "verbs":[{"token":"w1","word":"zijn","form":"present_tense"}],"main_verb":"w1",
    "adjuncts":[{"token":"a1","word":"gisteren"},{"token":"a2","word":"na(a1)"}],"s_adjuncts":["a2"]})J")));
  CHECK(na.contains("adjt_word(a2,na(a1))"));
  CHECK(na.contains("adjt_word(a1,gisteren)"));
  CHECK(na.contains("s_adjunct(s1,a2)"));
  CHECK_FALSE(na.contains("s_adjunct(s1,a1)"));
}

TEST_CASE("structural errors in sentence descriptions") {
  auto bad = [](const char* json) {
    CHECK_THROWS_AS(encode_sentence(parse_sentence(json)), SentenceError);
  };
  // Two main verbs.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"infinitive"},
        {"token":"w2","word":"zijn","form":"present_tense"}],"main_verb":["w1","w2"]})J");
  // No main verb.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"infinitive"}]})J");
  // Unknown form.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"gerund"}],"main_verb":"w1"})J");
  // Auxiliary chain that does not reach the main verb.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"infinitive"},
        {"token":"w2","word":"zullen","form":"present_tense"},{"token":"w3","word":"zijn","form":"infinitive"}],
        "main_verb":"w1","aux_verbs":[{"aux":"w2","complement":"w3"},{"aux":"w3","complement":"w2"}]})J");
  // Adjunct not attached.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"present_tense"}],"main_verb":"w1",
        "adjuncts":[{"token":"a1","word":"gisteren"}]})J");
  // Duplicate token.
  bad(R"J({"clause":"s1","verbs":[{"token":"w1","word":"eten","form":"present_tense"}],"main_verb":"w1",
        "adjuncts":[{"token":"w1","word":"gisteren"}],"s_adjuncts":["w1"]})J");
  CHECK_THROWS_AS(parse_sentence("{not json"), SentenceError);
  CHECK_THROWS_AS(parse_sentence(R"J({"verbs":[]})J"), SentenceError);
}

TEST_CASE("text rendering") {
  AbductiveModel m;
  VarId next = 0;
  m.abduced[Symbol("token_verb")] = {parse_term("token_verb(w1,v_zijn)", next),
                                     parse_term("token_verb(w2,t_zijn)", next)};
  m.abduced[Symbol("adjtime")] = {parse_term("adjtime(a1,int(ts(1999,1,1,0),ts(1999,1,2,0)))", next)};
  m.abduced[Symbol("result")] = {};
  CHECK(render_text(m) ==
        "adjtime: [adjtime(a1,int(ts(1999,1,1,0),ts(1999,1,2,0)))]\n"
        "token_verb: [token_verb(w2,t_zijn),token_verb(w1,v_zijn)]\n");
}

TEST_CASE("JSON rendering and round trip") {
  AbductiveModel m;
  VarId next = 0;
  m.abduced[Symbol("token_verb")] = {parse_term("token_verb(w1,v_zijn)", next),
                                     parse_term("token_verb(w2,t_zijn)", next)};
  m.abduced[Symbol("adjtime")] = {parse_term("adjtime(a1,int(ts(1999,1,1,0),ts(1999,1,2,0)))", next)};
  m.abduced[Symbol("odd")] = {parse_term("odd(f(3,minf),-2)", next)};
  std::string js = render_json(m, -1);
  CHECK(js.find(R"J("adjtime":[{"functor":"adjtime","args":["a1",{"functor":"int","args":[{"year":1999,"month":1,"day":1,"hour":0})J") !=
        std::string::npos);
  CHECK(js.find("\"adjtime\"") < js.find("\"odd\""));
  CHECK(js.find("\"odd\"") < js.find("\"token_verb\""));
  CHECK(same_atoms(parse_json_model(js), m));
  CHECK(render_json(AbductiveModel{}) == "{}");
  CHECK_THROWS_AS(parse_json_model("[1]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_json_model(R"J({"p":[{"functor":"q","args":[]}]})J"), std::invalid_argument);
}

TEST_CASE("round trip of solver models") {
  for (oracle::ScenarioResult r : {oracle::gisteren_default(), oracle::hamburger_ambiguity()}) {
    for (const AbductiveModel& m : r.models) {
      CHECK(same_atoms(parse_json_model(render_json(m)), m));
      CHECK(render_text(m) == render_text(m));
    }
  }
}
