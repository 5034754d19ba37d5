#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "aba/json_codec.hpp"
#include "aba/pack_io.hpp"
#include "live_server.hpp"
#include "test_packs.hpp"

namespace aba::api {
namespace {

using codec::Json;
using testing::LiveServer;

ServiceOptions test_options() {
  ServiceOptions options;
  options.test_clock = true;
  options.gate_seed = 5;
  options.media_root = ABA_TEST_DATA_DIR "/media";
  return options;
}

httplib::Headers at(long long ms) { return {{kTestClockHeader, std::to_string(ms)}}; }

Json body_of(const httplib::Result& res) {
  EXPECT_TRUE(res) << "request failed";
  return Json::parse(res->body);
}

std::string obtain_token(httplib::Client& client, long long now = 0) {
  const Json challenge = body_of(client.Post("/gate", at(now), "", "application/json"));
  const Json answer{{"challenge_id", challenge["challenge_id"]},
                    {"answer", challenge["operand_a"].get<int>() * challenge["operand_b"].get<int>()}};
  auto res = client.Post("/gate/verify", at(now), answer.dump(), "application/json");
  EXPECT_EQ(res->status, 200);
  return body_of(res)["token"].get<std::string>();
}

httplib::Headers with_token(const std::string& token, long long now = 0) {
  return {{kTestClockHeader, std::to_string(now)}, {kGateTokenHeader, token}};
}

std::string new_item_json(const std::string& id, const std::string& cls = "eating") {
  return codec::encode(testing::make_item(id, cls)).dump();
}

TEST(GateApiTest, ChallengeHidesAnswerAndIssuesToken) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const Json challenge = body_of(client.Post("/gate", at(0), "", "application/json"));
  EXPECT_FALSE(challenge.contains("expected"));
  EXPECT_EQ(challenge["operation"], "multiplication");

  const std::string token = obtain_token(client);
  EXPECT_EQ(token.size(), 32u);
}

TEST(GateApiTest, WrongReusedAndExpiredChallenges) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const Json challenge = body_of(client.Post("/gate", at(0), "", "application/json"));
  const int product = challenge["operand_a"].get<int>() * challenge["operand_b"].get<int>();

  auto wrong = client.Post("/gate/verify", at(1000),
                           Json{{"challenge_id", challenge["challenge_id"]}, {"answer", product + 1}}.dump(),
                           "application/json");
  EXPECT_EQ(wrong->status, 403);
  EXPECT_EQ(body_of(wrong)["code"], "gate-wrong-answer");

  auto reused = client.Post("/gate/verify", at(2000),
                            Json{{"challenge_id", challenge["challenge_id"]}, {"answer", product}}.dump(),
                            "application/json");
  EXPECT_EQ(reused->status, 403);
  EXPECT_EQ(body_of(reused)["reason"], "reused");

  const Json late = body_of(client.Post("/gate", at(0), "", "application/json"));
  auto expired = client.Post(
      "/gate/verify", at(5 * 60 * 1000),
      Json{{"challenge_id", late["challenge_id"]}, {"answer", late["operand_a"].get<int>() * late["operand_b"].get<int>()}}
          .dump(),
      "application/json");
  EXPECT_EQ(expired->status, 403);
  EXPECT_EQ(body_of(expired)["code"], "gate-expired");
}

TEST(GateApiTest, MutationsRequireLiveToken) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();

  auto missing = client.Post("/content/items", at(0), new_item_json("eating-3"), "application/json");
  EXPECT_EQ(missing->status, 401);
  EXPECT_EQ(body_of(missing)["code"], "gate-token-required");

  auto bogus = client.Post("/content/items", with_token("deadbeef"), new_item_json("eating-3"), "application/json");
  EXPECT_EQ(bogus->status, 401);
  EXPECT_EQ(body_of(bogus)["code"], "gate-token-invalid");

  const std::string token = obtain_token(client);
  const long long after_lifetime = 30LL * 60 * 1000;
  auto stale = client.Post("/content/items", with_token(token, after_lifetime), new_item_json("eating-3"),
                           "application/json");
  EXPECT_EQ(stale->status, 401);
  EXPECT_EQ(body_of(stale)["code"], "gate-token-invalid");
  EXPECT_EQ(server.service().pack_snapshot().items.size(), 4u);
}

TEST(ContentApiTest, CrudRoundTrip) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const std::string token = obtain_token(client);

  auto created = client.Post("/content/items", with_token(token), new_item_json("eating-3"), "application/json");
  ASSERT_EQ(created->status, 201);
  EXPECT_EQ(body_of(created)["item_id"], "eating-3");
  EXPECT_EQ(body_of(client.Get("/content", at(0)))["version"], 2);

  auto edited = client.Put("/content/items/eating-3", with_token(token), R"({"prompt_text":"Who eats?"})",
                           "application/json");
  ASSERT_EQ(edited->status, 200);
  EXPECT_EQ(body_of(client.Get("/content/items/eating-3"))["prompt_text"], "Who eats?");

  auto removed = client.Delete("/content/items/eating-3", with_token(token));
  EXPECT_EQ(removed->status, 204);
  auto gone = client.Get("/content/items/eating-3");
  EXPECT_EQ(gone->status, 404);
  EXPECT_EQ(body_of(gone)["code"], "item-not-found");

  auto unknown = client.Delete("/content/items/nope", with_token(token));
  EXPECT_EQ(unknown->status, 404);
  EXPECT_EQ(body_of(unknown)["code"], "item-not-found");

  auto dup = client.Post("/content/items", with_token(token), new_item_json("eating-1"), "application/json");
  EXPECT_EQ(dup->status, 409);
  EXPECT_EQ(body_of(dup)["code"], "duplicate-item");
}

TEST(ContentApiTest, MalformedAndUnknownFieldsRejected) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const std::string token = obtain_token(client);

  auto malformed = client.Post("/content/items", with_token(token), "{\"item_id\":", "application/json");
  EXPECT_EQ(malformed->status, 400);
  EXPECT_EQ(body_of(malformed)["code"], "parse-error");

  Json item = Json::parse(new_item_json("eating-3"));
  item["student_name"] = "x";
  auto extra = client.Post("/content/items", with_token(token), item.dump(), "application/json");
  EXPECT_EQ(extra->status, 400);
  EXPECT_NE(body_of(extra)["message"].get<std::string>().find("student_name"), std::string::npos);
}

TEST(ContentApiTest, ValidationReportNamesMinTwoRule) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const std::string token = obtain_token(client);

  auto removed = client.Delete("/content/items/eating-2", with_token(token));
  ASSERT_EQ(removed->status, 204);
  const Json report = body_of(client.Get("/content/validation"));
  EXPECT_FALSE(report["valid"].get<bool>());
  ASSERT_EQ(report["violations"].size(), 1u);
  EXPECT_EQ(report["violations"][0]["rule"], "min-two-per-classification");
  EXPECT_EQ(report["violations"][0]["subject_id"], "eating");

  auto session = client.Post("/sessions", at(0), "{}", "application/json");
  EXPECT_EQ(session->status, 422);
  EXPECT_EQ(body_of(session)["code"], "pack-invalid");
  EXPECT_EQ(body_of(session)["violations"][0]["rule"], "min-two-per-classification");
}

TEST(ContentApiTest, ClassificationsAddAndRemove) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();
  const std::string token = obtain_token(client);

  auto added = client.Post("/content/classifications", with_token(token),
                           R"({"classification_id":"shapes","name":"Shapes","subject":"math"})", "application/json");
  EXPECT_EQ(added->status, 201);
  EXPECT_EQ(body_of(client.Get("/content/classifications")).size(), 3u);

  auto in_use = client.Delete("/content/classifications/eating", with_token(token));
  EXPECT_EQ(in_use->status, 409);
  EXPECT_EQ(body_of(in_use)["code"], "classification-in-use");

  EXPECT_EQ(client.Delete("/content/classifications/shapes", with_token(token))->status, 204);
}

TEST(ContentApiTest, MutationsPersistToPackFile) {
  const auto path = std::filesystem::temp_directory_path() / ("aba_service_persist_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + ".json");
  ServiceOptions options = test_options();
  options.pack_path = path;
  {
    LiveServer server(testing::four_item_pack(), options);
    auto client = server.client();
    const std::string token = obtain_token(client);
    ASSERT_EQ(client.Post("/content/items", with_token(token), new_item_json("eating-3"), "application/json")->status,
              201);
  }
  const ContentPack reloaded = load_pack(path);
  EXPECT_EQ(reloaded.version, 2u);
  EXPECT_NE(reloaded.find_item("eating-3"), nullptr);
  std::filesystem::remove(path);
}

class SessionApiTest : public ::testing::Test {
 protected:
  SessionApiTest() : server_(testing::four_item_pack(), test_options()), client_(server_.client()) {}

  std::string start(std::uint64_t seed) {
    auto res = client_.Post("/sessions", at(0), Json{{"seed", seed}}.dump(), "application/json");
    EXPECT_EQ(res->status, 201);
    return body_of(res)["session_id"].get<std::string>();
  }

  Json prompt(const std::string& id, long long now) { return body_of(client_.Get("/sessions/" + id + "/prompt", at(now))); }

  httplib::Result answer(const std::string& id, std::size_t index, long long now) {
    return client_.Post("/sessions/" + id + "/answer", at(now), Json{{"selected_index", index}}.dump(),
                        "application/json");
  }

  // Correct index of a prompt, looked up from the teacher view.
  std::size_t correct_index(const Json& p) {
    return body_of(client_.Get("/content/items/" + p["item_id"].get<std::string>()))["correct_index"].get<std::size_t>();
  }

  LiveServer server_;
  httplib::Client client_;
};

TEST_F(SessionApiTest, PromptHidesAnswerAndIsIdempotent) {
  const std::string id = start(3);
  const Json first = prompt(id, 0);
  EXPECT_FALSE(first.contains("correct_index"));
  EXPECT_EQ(first["token_display"], 0);
  EXPECT_EQ(prompt(id, 5000), first);
}

TEST_F(SessionApiTest, FifthCorrectAnswerGrantsReward) {
  const std::string id = start(9);
  long long now = 0;
  Json last;
  for (int i = 0; i < 5; ++i) {
    const Json p = prompt(id, now);
    now += 10000;
    auto res = answer(id, correct_index(p), now);
    ASSERT_EQ(res->status, 200);
    last = body_of(res);
    if (i < 4) {
      EXPECT_EQ(last["outcome"]["outcome"], "correct");
      EXPECT_EQ(last["tokens"], i + 1);
      EXPECT_TRUE(last["reward"].is_null());
    }
  }
  EXPECT_EQ(last["outcome"]["outcome"], "reward_granted");
  EXPECT_EQ(last["reward"]["duration_cap_s"], 75);
  EXPECT_EQ(last["tokens"], 0);
  EXPECT_EQ(prompt(id, now)["token_display"], 0);
}

TEST_F(SessionApiTest, IncorrectAnswerSchedulesFollowup) {
  const std::string id = start(4);
  const Json p = prompt(id, 0);
  const std::size_t right = correct_index(p);
  const Json res = body_of(answer(id, right == 0 ? 1 : 0, 1000));
  EXPECT_EQ(res["outcome"]["outcome"], "incorrect");
  EXPECT_TRUE(res["outcome"]["followup_scheduled"].get<bool>());
  const Json next = prompt(id, 2000);
  EXPECT_TRUE(next["is_followup"].get<bool>());
  EXPECT_EQ(next["classification_id"], p["classification_id"]);
  EXPECT_NE(next["item_id"], p["item_id"]);
}

TEST_F(SessionApiTest, ErrorsMapToStatusCodes) {
  const std::string id = start(1);
  auto none = answer(id, 0, 0);
  EXPECT_EQ(none->status, 409);
  EXPECT_EQ(body_of(none)["code"], "no-outstanding-prompt");

  prompt(id, 0);
  auto range = answer(id, 99, 1000);
  EXPECT_EQ(range->status, 400);
  EXPECT_EQ(body_of(range)["code"], "choice-out-of-range");

  ASSERT_EQ(answer(id, 0, 1000)->status, 200);
  auto twice = answer(id, 0, 2000);
  EXPECT_EQ(twice->status, 409);

  auto missing = client_.Get("/sessions/session-999/prompt");
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(body_of(missing)["code"], "session-not-found");

  auto route = client_.Get("/nowhere");
  EXPECT_EQ(route->status, 404);
  EXPECT_EQ(body_of(route)["code"], "route-not-found");

  auto bad_clock = client_.Get("/sessions/" + id + "/prompt", httplib::Headers{{kTestClockHeader, "soon"}});
  EXPECT_EQ(bad_clock->status, 400);

  auto bad_body = client_.Post("/sessions/" + id + "/answer", at(3000), R"({"selected_index":-1})", "application/json");
  EXPECT_EQ(bad_body->status, 400);
}

TEST_F(SessionApiTest, HeartbeatCountsTowardEngagement) {
  const std::string id = start(2);
  const Json p = prompt(id, 0);
  ASSERT_EQ(answer(id, correct_index(p), 30000)->status, 200);
  const Json beat = body_of(client_.Post("/sessions/" + id + "/heartbeat", at(90000), "", "application/json"));
  EXPECT_EQ(beat["recorded_at"], 90000);
  const Json metrics = body_of(client_.Get("/sessions/" + id + "/metrics"));
  EXPECT_DOUBLE_EQ(metrics["engagement_hours"].get<double>(), 60.0 / 3600.0);
  EXPECT_DOUBLE_EQ(metrics["accuracy_rate_overall"].get<double>(), 100.0);
  EXPECT_TRUE(metrics["generalization_rate"].is_null());
}

TEST_F(SessionApiTest, LogHasNoPersonalFields) {
  const std::string id = start(2);
  const Json p = prompt(id, 0);
  answer(id, correct_index(p), 1000);
  const Json log = body_of(client_.Get("/sessions/" + id));
  for (const auto& [key, value] : log.items()) {
    EXPECT_TRUE(key == "session_id" || key == "config" || key == "token_count" || key == "cycle_index" ||
                key == "pending_followup" || key == "trials" || key == "reward_events")
        << key;
  }
  EXPECT_EQ(log["trials"].size(), 1u);
}

TEST_F(SessionApiTest, SameSeedSameSequence) {
  auto run = [&](std::uint64_t seed) {
    const std::string id = start(seed);
    std::vector<std::string> items;
    long long now = 0;
    for (int i = 0; i < 12; ++i) {
      const Json p = prompt(id, now);
      items.push_back(p["item_id"]);
      now += 1000;
      answer(id, i % 3 == 0 ? (correct_index(p) + 1) % 3 : correct_index(p), now);
    }
    return items;
  };
  EXPECT_EQ(run(77), run(77));
}

TEST(MediaApiTest, ServesFilesAndBlocksTraversal) {
  LiveServer server(testing::four_item_pack(), test_options());
  auto client = server.client();

  auto ok = client.Get("/media/dog_eating.png");
  ASSERT_EQ(ok->status, 200);
  EXPECT_EQ(ok->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(ok->body.substr(1, 3), "PNG");

  auto missing = client.Get("/media/cat.png");
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(body_of(missing)["code"], "media-not-found");

  for (const char* path : {"/media/../demo_pack.json", "/media/%2e%2e/demo_pack.json", "/media/a/../../x",
                           "/media/%2E%2E%2Fdemo_pack.json", "/media//etc/passwd"}) {
    auto res = client.Get(path);
    ASSERT_TRUE(res) << path;
    EXPECT_EQ(res->status, 400) << path;
  }
}

}  // namespace
}  // namespace aba::api
