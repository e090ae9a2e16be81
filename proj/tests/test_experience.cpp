#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lplh/errors.hpp"
#include "lplh/experience.hpp"

#include <cmath>
#include <cstdio>
#include <random>

using namespace lplh;

TEST_CASE("embedder is deterministic, fixed-dim, and L2-normalized") {
    HashingEmbedder emb;
    auto v1 = emb.embed("the brass lantern glows");
    auto v2 = emb.embed("the brass lantern glows");
    CHECK(v1 == v2);
    CHECK(v1.size() == HashingEmbedder::kDim);
    double norm = 0;
    for (float x : v1) norm += double(x) * x;
    CHECK(std::abs(norm - 1.0) < 1e-5);
    // empty text embeds to the zero vector, not NaN
    auto z = emb.embed("");
    for (float x : z) CHECK(x == 0.0f);
}

TEST_CASE("token order does not matter, token identity does") {
    HashingEmbedder emb;
    CHECK(emb.embed("open the chest") == emb.embed("the chest open"));
    CHECK(emb.embed("open the chest") != emb.embed("open the door"));
}

static ExperienceRecord make_record(int salt) {
    ExperienceRecord r;
    r.location = salt % 2 ? "Kitchen" : "Cellar";
    r.situation = "situation " + std::to_string(salt);
    r.trigger_step = "step " + std::to_string(salt % 5);
    r.delta = salt % 3 ? 5 : -10;
    r.earn = r.delta > 0;
    r.lesson = (r.earn ? "Earn Points: " : "Lose Points: ") + std::to_string(salt);
    r.room_tag = r.location;
    r.tags = {r.room_tag, "t" + std::to_string(salt % 7)};
    r.difficulty = "unknown";
    return r;
}

TEST_CASE("store assigns sequential ids and rejects bad vectors") {
    struct BadEmbedder : Embedder {
        std::vector<float> embed(const std::string&) const override { return {1.f}; }
        size_t dimension() const override { return HashingEmbedder::kDim; }
    };
    ExperienceStore good(std::make_shared<HashingEmbedder>());
    CHECK(good.store(make_record(1)) == 0);
    CHECK(good.store(make_record(2)) == 1);

    ExperienceStore bad(std::make_shared<BadEmbedder>());
    CHECK_THROWS_AS(bad.store(make_record(1)), StoreRejected);
}

TEST_CASE("record JSON round-trip") {
    auto r = make_record(3);
    r.puzzle_steps = {"north", "take key"};
    r.degraded = true;
    auto back = ExperienceRecord::from_json(r.to_json());
    CHECK(back.to_json() == r.to_json());
    CHECK(back.lesson == r.lesson);
    CHECK(back.earn == r.earn);
}

TEST_CASE("retrieval oracle: brute force with recency tie-break") {
    HashingEmbedder ref;
    std::mt19937 rng(4242);
    const char* vocab[] = {"lantern", "grue",  "cellar", "troll", "sword",
                           "window",  "forest", "chest",  "dark",  "stairs"};
    auto random_text = [&] {
        std::string t;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            if (i) t += ' ';
            t += vocab[rng() % 10];
        }
        return t;
    };

    int queries_done = 0;
    for (int round = 0; round < 25 && queries_done < 500; ++round) {
        ExperienceStore store(std::make_shared<HashingEmbedder>());
        int n = 1 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) {
            auto r = make_record(static_cast<int>(rng() % 1000));
            r.situation = random_text();
            r.lesson = random_text();
            store.store(std::move(r));
        }
        for (int q = 0; q < 20; ++q, ++queries_done) {
            std::string query = random_text();
            size_t k = 1 + rng() % 5;
            auto got = store.retrieve(query, k);

            // brute force over the stored vectors
            auto qv = ref.embed(query);
            std::vector<std::pair<float, int>> scored;
            for (size_t i = 0; i < store.size(); ++i) {
                const auto& v = store.vectors()[i];
                float dot = 0;
                for (size_t d = 0; d < v.size(); ++d) dot += v[d] * qv[d];
                scored.push_back({dot, static_cast<int>(i)});
            }
            std::sort(scored.begin(), scored.end(), [](auto& a, auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second > b.second; // newer id wins ties
            });
            size_t expect = std::min(k, scored.size());
            REQUIRE(got.size() == expect);
            for (size_t i = 0; i < expect; ++i) {
                CHECK(got[i].first.id == scored[i].second);
                CHECK(got[i].second == doctest::Approx(scored[i].first).epsilon(1e-6));
            }
        }
    }
    CHECK(queries_done >= 500);
}

TEST_CASE("save and load resume the store byte-identically") {
    ExperienceStore store(std::make_shared<HashingEmbedder>());
    for (int i = 0; i < 7; ++i) store.store(make_record(i));
    std::string rec = "/tmp/lplh_test_exp.jsonl", vec = "/tmp/lplh_test_exp.vec";
    store.save(rec, vec);
    auto back = ExperienceStore::load(std::make_shared<HashingEmbedder>(), rec, vec);
    REQUIRE(back.size() == store.size());
    for (size_t i = 0; i < store.size(); ++i) {
        CHECK(back.records()[i].to_json() == store.records()[i].to_json());
        CHECK(back.vectors()[i] == store.vectors()[i]);
    }
    std::remove(rec.c_str());
    std::remove(vec.c_str());
}

TEST_CASE("summaries fire on scoring events and death only") {
    CHECK(should_summarize(5, TerminalKind::none));
    CHECK(should_summarize(-10, TerminalKind::none));
    CHECK(should_summarize(0, TerminalKind::death));
    CHECK_FALSE(should_summarize(0, TerminalKind::none));
    CHECK_FALSE(should_summarize(0, TerminalKind::victory));
    CHECK_FALSE(should_summarize(0, TerminalKind::step_limit));
}

TEST_CASE("fallback records have exactly one lesson polarity") {
    std::vector<HistoryTurn> window = {{"look", "Foyer\nThere is a chest here.", true},
                                       {"down", "It is pitch black.", true}};
    auto lose = fallback_record(window, -10, TerminalKind::death, "Foyer", 1, 2);
    CHECK_FALSE(lose.earn);
    CHECK(lose.lesson.rfind("Lose Points:", 0) == 0);
    CHECK(lose.degraded);
    CHECK(lose.room_tag == "Foyer");
    CHECK(lose.tags.size() <= 4);

    auto earn = fallback_record(window, 10, TerminalKind::none, "Foyer", 1, 5);
    CHECK(earn.earn);
    CHECK(earn.lesson.rfind("Earn Points:", 0) == 0);
}

TEST_CASE("record_from_fields keeps summarizer content") {
    ExperienceFields f;
    f.locations = {"roof"};
    f.steps = {"climb ladder", "jump"};
    f.objects = {"ladder"};
    f.tags = {"Room1", "ladder"};
    f.room_tag = "Room1";
    f.difficulty = "easy";
    f.body = "climbed to the roof and jumped for the prize";
    auto r = record_from_fields(f, 5, TerminalKind::none, "Yard", 2, 40);
    CHECK(r.location == "roof");
    CHECK(r.puzzle_steps == std::vector<std::string>{"climb ladder", "jump"});
    CHECK(r.trigger_step == "jump");
    CHECK(r.earn);
    CHECK(r.difficulty == "easy");
    CHECK_FALSE(r.degraded);
    // missing location falls back to the caller's
    f.locations.clear();
    CHECK(record_from_fields(f, 5, TerminalKind::none, "Yard", 2, 40).location == "Yard");
}

TEST_CASE("build_query combines room and observation headline") {
    auto q = build_query("Foyer", "A grand entrance hall.\nThere is a chest here.");
    CHECK(q.find("Foyer") != std::string::npos);
    CHECK(q.find("grand entrance hall") != std::string::npos);
}
