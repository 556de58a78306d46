#include "tlx/api.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_server.hpp"
#include "tlx/json_codec.hpp"

namespace tlx {
namespace {

using testkit::kAdminToken;
using testkit::TempDir;
using json = tlx::Json;

class ApiTest : public ::testing::Test {
 protected:
  ApiTest() : store_(dir_.path()), api_(store_, {kAdminToken}) {}

  ApiResponse call(const std::string& method, const std::string& path, const std::string& token = "",
                   const json& body = nullptr, std::map<std::string, std::string> query = {}) {
    ApiRequest req{method, path, std::move(query), token.empty() ? "" : "Bearer " + token,
                   body.is_null() ? "" : body.dump()};
    return api_.handle(req);
  }

  static json body(const ApiResponse& r) { return json::parse(r.body); }
  static std::string code(const ApiResponse& r) { return body(r).at("error").at("code").get<std::string>(); }

  json create_experiment(const std::string& name = "Pilot study A") {
    const auto r = call("POST", "/api/experiments", kAdminToken, {{"name", name}});
    EXPECT_EQ(r.status, 201);
    return body(r);
  }

  json join(const std::string& code) {
    const auto r = call("POST", "/api/join", "", {{"join_code", code}});
    EXPECT_EQ(r.status, 201) << r.body;
    return body(r);
  }

  static json worked_ratings() {
    json r = json::object();
    for (int i = 0; i < 6; ++i) r[std::string(dimension_key(testkit::dim(i)))] = testkit::kWorkedRatings[i];
    return {{"ratings", r}};
  }

  static json worked_choices() {
    json choices = json::array();
    for (const auto& c : testkit::ranked_tournament(testkit::kWorkedRank)) {
      choices.push_back({{"a", dimension_key(testkit::dim(c[0]))},
                         {"b", dimension_key(testkit::dim(c[1]))},
                         {"chosen", dimension_key(testkit::dim(c[2]))}});
    }
    return {{"choices", choices}};
  }

  TempDir dir_;
  ExperimentStore store_;
  ApiService api_;
};

TEST_F(ApiTest, RequiresAdminToken) {
  EXPECT_THROW(ApiService(store_, {""}), std::invalid_argument);
  EXPECT_EQ(call("GET", "/api/experiments").status, 401);
  EXPECT_EQ(code(call("GET", "/api/experiments", "wrong")), "unauthorized");
  EXPECT_EQ(call("GET", "/api/experiments", kAdminToken).status, 200);
  ApiRequest lower{"GET", "/api/experiments", {}, std::string("bearer ") + kAdminToken, ""};
  EXPECT_EQ(api_.handle(lower).status, 200);
}

TEST_F(ApiTest, CreateListCloseExperiment) {
  const auto exp = create_experiment();
  EXPECT_EQ(exp.at("status"), "open");
  EXPECT_EQ(exp.at("name"), "Pilot study A");
  const auto list = body(call("GET", "/api/experiments", kAdminToken));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0], exp);

  const std::string id = exp.at("experiment_id");
  EXPECT_EQ(body(call("GET", "/api/experiments/" + id, kAdminToken)), exp);
  EXPECT_EQ(body(call("POST", "/api/experiments/" + id + "/close", kAdminToken)).at("status"), "closed");
  EXPECT_EQ(call("POST", "/api/experiments/" + id + "/close", kAdminToken).status, 200);

  const auto closed_join = call("POST", "/api/join", "", {{"join_code", exp.at("join_code")}});
  EXPECT_EQ(closed_join.status, 410);
  EXPECT_EQ(code(closed_join), "experiment_closed");
}

TEST_F(ApiTest, CreateValidation) {
  const auto empty = call("POST", "/api/experiments", kAdminToken, {{"name", ""}});
  EXPECT_EQ(empty.status, 400);
  EXPECT_EQ(code(empty), "invalid_name");
  EXPECT_EQ(code(call("POST", "/api/experiments", kAdminToken, {{"name", 5}})), "invalid_name");
  EXPECT_EQ(code(call("POST", "/api/experiments", kAdminToken, json::object())), "invalid_body");
  ApiRequest bad{"POST", "/api/experiments", {}, std::string("Bearer ") + kAdminToken, "{oops"};
  const auto r = api_.handle(bad);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(code(r), "invalid_json");
}

TEST_F(ApiTest, UnknownRoutesAndEntities) {
  EXPECT_EQ(call("GET", "/api/nothing", kAdminToken).status, 404);
  EXPECT_EQ(code(call("GET", "/api/experiments/missing/results", kAdminToken)), "unknown_experiment");
  EXPECT_EQ(call("GET", "/api/experiments/missing/results", kAdminToken).status, 404);
  EXPECT_EQ(call("DELETE", "/api/experiments", kAdminToken).status, 405);
  EXPECT_EQ(call("GET", "/api/join").status, 405);
  EXPECT_EQ(code(call("POST", "/api/join", "", {{"join_code", "ZZZZZZ"}})), "unknown_join_code");
  EXPECT_EQ(call("GET", "/api/participants/missing/schedule", "x").status, 404);
}

TEST_F(ApiTest, ParticipantProtocol) {
  const auto exp = create_experiment();
  const auto joined = join(exp.at("join_code"));
  const std::string pid = joined.at("participant_id");
  const std::string token = joined.at("session_token");
  ASSERT_EQ(joined.at("dimensions").size(), 6u);
  EXPECT_EQ(joined.at("dimensions")[3].at("low_anchor"), "Good");

  const auto schedule = body(call("GET", "/api/participants/" + pid + "/schedule", token));
  ASSERT_EQ(schedule.at("items").size(), 15u);
  EXPECT_EQ(schedule, schedule_json(comparison_schedule(store_.get_participant(pid).schedule_seed)));

  const auto early = call("POST", "/api/participants/" + pid + "/comparisons", token, worked_choices());
  EXPECT_EQ(early.status, 409);
  EXPECT_EQ(code(early), "wrong_state");

  auto bad = worked_ratings();
  bad["ratings"]["mental"] = 150;
  const auto out_of_range = call("POST", "/api/participants/" + pid + "/ratings", token, bad);
  EXPECT_EQ(out_of_range.status, 400);
  EXPECT_EQ(code(out_of_range), "rating_out_of_range");
  EXPECT_EQ(store_.get_participant(pid).state, SessionState::Created);

  const auto rated = call("POST", "/api/participants/" + pid + "/ratings", token, worked_ratings());
  EXPECT_EQ(rated.status, 200);
  EXPECT_EQ(body(rated).at("state"), "ratings_submitted");

  const auto done = call("POST", "/api/participants/" + pid + "/comparisons", token, worked_choices());
  ASSERT_EQ(done.status, 200) << done.body;
  EXPECT_EQ(body(done).at("weighted_score").get<double>(), 58.33);
  EXPECT_EQ(body(done).at("raw_score").get<double>(), 50.0);
  EXPECT_EQ(body(done).at("adjusted").at("mental"), 165);

  // Read-your-write.
  EXPECT_EQ(call("GET", "/api/participants/" + pid + "/result", token).body, done.body);
  const auto results = body(call("GET", "/api/experiments/" + std::string(exp.at("experiment_id")) + "/results",
                                 kAdminToken));
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0], body(done));

  // Idempotent retry, conflicting retry.
  EXPECT_EQ(call("POST", "/api/participants/" + pid + "/comparisons", token, worked_choices()).body, done.body);
  auto changed = worked_ratings();
  changed["ratings"]["effort"] = 0;
  EXPECT_EQ(call("POST", "/api/participants/" + pid + "/ratings", token, changed).status, 409);
}

TEST_F(ApiTest, RatingBodyForms) {
  const auto exp = create_experiment();
  const auto joined = join(exp.at("join_code"));
  const std::string pid = joined.at("participant_id");
  const std::string token = joined.at("session_token");
  const std::string path = "/api/participants/" + pid + "/ratings";

  json dup = json::array();
  for (int i = 0; i < 6; ++i) dup.push_back({{"dimension", dimension_key(testkit::dim(i))}, {"value", 10}});
  dup.push_back({{"dimension", "mental"}, {"value", 20}});
  EXPECT_EQ(code(call("POST", path, token, {{"ratings", dup}})), "duplicate_dimension");

  json missing = worked_ratings();
  missing["ratings"].erase("frustration");
  EXPECT_EQ(code(call("POST", path, token, missing)), "missing_dimension");

  json unknown = worked_ratings();
  unknown["ratings"]["boredom"] = 1;
  EXPECT_EQ(code(call("POST", path, token, unknown)), "invalid_body");

  json fractional = worked_ratings();
  fractional["ratings"]["mental"] = 55.5;
  EXPECT_EQ(code(call("POST", path, token, fractional)), "invalid_body");

  json huge = worked_ratings();
  huge["ratings"]["mental"] = 1e3;
  EXPECT_EQ(call("POST", path, token, huge).status, 400);
  json negative = worked_ratings();
  negative["ratings"]["mental"] = -5;
  EXPECT_EQ(code(call("POST", path, token, negative)), "rating_out_of_range");

  dup.erase(dup.size() - 1);
  EXPECT_EQ(call("POST", path, token, {{"ratings", dup}}).status, 200);
}

TEST_F(ApiTest, ComparisonValidationCodes) {
  const auto exp = create_experiment();
  const auto joined = join(exp.at("join_code"));
  const std::string pid = joined.at("participant_id");
  const std::string token = joined.at("session_token");
  ASSERT_EQ(call("POST", "/api/participants/" + pid + "/ratings", token, worked_ratings()).status, 200);
  const std::string path = "/api/participants/" + pid + "/comparisons";

  auto short_set = worked_choices();
  short_set["choices"].erase(14);
  EXPECT_EQ(code(call("POST", path, token, short_set)), "missing_pair");

  auto dup = worked_choices();
  dup["choices"].push_back(dup["choices"][0]);
  EXPECT_EQ(code(call("POST", path, token, dup)), "duplicate_pair");

  auto invalid = worked_choices();
  invalid["choices"][0]["chosen"] = "frustration";  // pair 0 is (mental, physical)
  EXPECT_EQ(code(call("POST", path, token, invalid)), "invalid_choice");

  auto self = worked_choices();
  self["choices"][0]["b"] = "mental";
  EXPECT_EQ(code(call("POST", path, token, self)), "invalid_pair");

  EXPECT_EQ(store_.get_participant(pid).state, SessionState::RatingsSubmitted);
}

TEST_F(ApiTest, AuthorizationIsolation) {
  const auto exp = create_experiment();
  const std::string id = exp.at("experiment_id");
  const auto a = join(exp.at("join_code"));
  const auto b = join(exp.at("join_code"));
  const std::string pid = a.at("participant_id");

  // Admin token is not a participant credential.
  EXPECT_EQ(call("GET", "/api/participants/" + pid + "/schedule", kAdminToken).status, 401);
  EXPECT_EQ(call("POST", "/api/participants/" + pid + "/ratings", kAdminToken, worked_ratings()).status, 401);
  // Another participant's token is not either.
  EXPECT_EQ(call("GET", "/api/participants/" + pid + "/schedule", b.at("session_token")).status, 401);
  // Participant token is not an admin credential.
  for (const auto& path : {std::string("/api/experiments"), "/api/experiments/" + id + "/results",
                           "/api/experiments/" + id + "/summary", "/api/experiments/" + id + "/participants"}) {
    EXPECT_EQ(call("GET", path, a.at("session_token")).status, 401) << path;
  }
  EXPECT_EQ(call("GET", "/api/experiments/" + id + "/export", a.at("session_token"), nullptr, {{"format", "csv"}}).status,
            401);
  EXPECT_EQ(call("POST", "/api/experiments/" + id + "/close", a.at("session_token")).status, 401);
  EXPECT_EQ(store_.get_participant(pid).state, SessionState::Created);
}

TEST_F(ApiTest, ExportAndSummary) {
  const auto exp = create_experiment();
  const std::string id = exp.at("experiment_id");
  const auto joined = join(exp.at("join_code"));
  const std::string pid = joined.at("participant_id");
  const std::string token = joined.at("session_token");
  call("POST", "/api/participants/" + pid + "/ratings", token, worked_ratings());
  call("POST", "/api/participants/" + pid + "/comparisons", token, worked_choices());
  join(exp.at("join_code"));  // incomplete session

  const auto csv = call("GET", "/api/experiments/" + id + "/export", kAdminToken, nullptr, {{"format", "csv"}});
  EXPECT_EQ(csv.status, 200);
  EXPECT_EQ(csv.content_type, "text/csv; charset=utf-8");
  EXPECT_EQ(csv.attachment_filename, id + ".csv");
  EXPECT_NE(csv.body.find(",58.33,50.00\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.body.begin(), csv.body.end(), '\n'), 2);

  const auto js = call("GET", "/api/experiments/" + id + "/export", kAdminToken, nullptr, {{"format", "json"}});
  EXPECT_EQ(js.content_type, "application/json");
  EXPECT_EQ(js.attachment_filename, id + ".json");
  EXPECT_EQ(body(js).at("results").size(), 1u);

  const auto bad = call("GET", "/api/experiments/" + id + "/export", kAdminToken, nullptr, {{"format", "xml"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(code(bad), "invalid_format");
  EXPECT_EQ(call("GET", "/api/experiments/" + id + "/export", kAdminToken).status, 400);

  const auto summary = body(call("GET", "/api/experiments/" + id + "/summary", kAdminToken));
  EXPECT_EQ(summary.at("n_complete"), 1);
  EXPECT_EQ(summary.at("weighted_score").at("mean").get<double>(), 58.33);
  EXPECT_TRUE(summary.at("weighted_score").at("sd").is_null());
  EXPECT_EQ(summary.at("weights").at("performance").at("mean").get<double>(), 5.0);

  const auto participants = body(call("GET", "/api/experiments/" + id + "/participants", kAdminToken));
  ASSERT_EQ(participants.size(), 2u);
  EXPECT_FALSE(participants[0].contains("session_token"));
}

}  // namespace
}  // namespace tlx
