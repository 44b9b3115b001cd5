#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>
#include <stdexcept>

#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/orchestrator/bench.hpp"
#include "ccs/orchestrator/broker.hpp"
#include "ccs/orchestrator/orchestrator.hpp"
#include "ccs/orchestrator/results.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/synth/corpus.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ccs;
using namespace ccs::orchestrator;
using namespace std::chrono_literals;

namespace {

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::atomic<int> flaky_failures{0};

pipeline::Registry toy_registry() {
    pipeline::Registry r;
    r.add({"upper", "q", [](const pipeline::OpContext& ctx) {
               std::string s = ctx.input(0);
               for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
               return ctx.store.put(s);
           }});
    r.add({"concat", "q", [](const pipeline::OpContext& ctx) {
               std::string s;
               for (std::size_t i = 0; i < ctx.input_count(); ++i) s += ctx.input(i);
               return ctx.store.put(s);
           }});
    r.add({"boom", "q", [](const pipeline::OpContext&) -> std::string {
               throw Error(errc::kParseFailure, "not a document");
           }});
    r.add({"flaky", "q", [](const pipeline::OpContext& ctx) {
               if (flaky_failures.fetch_sub(1) > 0) throw std::runtime_error("connection reset");
               return ctx.store.put(ctx.input(0) + "!");
           }});
    return r;
}

struct Rig {
    InProcessBroker broker;
    MemoryResultBackend results;
    store::MemoryObjectStore store;
    pipeline::Registry registry;
    Orchestrator orch;
    explicit Rig(pipeline::Registry reg = toy_registry(), RetryPolicy retry = {3, 10ms})
        : registry(std::move(reg)), orch(broker, results, store, registry, retry) {}
    ExecutionReport drain(int workers = 1, FaultInjector faults = {}, std::chrono::milliseconds lease = 30000ms) {
        QueueConfig cfg;
        for (const auto& name : registry.names()) cfg.workers[registry.find(name)->queue] = workers;
        cfg.lease = lease;
        return orch.run_until_drained(cfg, faults);
    }
};

TaskSpec spec(std::string op, std::vector<std::string> inputs) {
    TaskSpec s;
    s.operation = std::move(op);
    s.inputs = std::move(inputs);
    return s;
}

}  // namespace

TEST_CASE("task ids are content hashes") {
    auto a = spec("upper", {"k1"});
    auto b = spec("upper", {"k1"});
    CHECK(task_id(a) == task_id(b));
    b.params = {{"x", 1}};
    CHECK(task_id(a) != task_id(b));
    auto c = a;
    c.then.push_back(spec("upper", {}));
    CHECK(task_id(a) != task_id(c));
    const Json j = c.to_json();
    CHECK(task_id(TaskSpec::from_json(JsonCursor(j))) == task_id(c));
}

TEST_CASE("submission") {
    Rig rig;
    const std::string in = rig.store.put("hello");
    SUBCASE("resubmitting the same work is a no-op") {
        const auto id = rig.orch.submit(spec("upper", {in}));
        CHECK(rig.orch.submit(spec("upper", {in})) == id);
        CHECK(rig.broker.outstanding() == 1);
        const auto r = rig.drain();
        CHECK(r.executed == 1);
        const auto st = rig.orch.status(id);
        REQUIRE(st);
        CHECK(st->state == TaskState::kSucceeded);
        CHECK(rig.store.get(*st->result) == "HELLO");
        // finished work is not redone either
        rig.orch.submit(spec("upper", {in}));
        CHECK(rig.broker.outstanding() == 0);
    }
    SUBCASE("unknown operation") {
        CHECK(error_code([&] { rig.orch.submit(spec("nope", {in})); }) == "no-such-operation");
        auto chained = spec("upper", {in});
        chained.then.push_back(spec("nope", {}));
        CHECK(error_code([&] { rig.orch.submit(chained); }) == "no-such-operation");
        CHECK(rig.broker.outstanding() == 0);
    }
    SUBCASE("missing input fails without retry") {
        const auto id = rig.orch.submit(spec("upper", {std::string(64, 'a')}));
        const auto r = rig.drain();
        CHECK(r.retried == 0);
        const auto st = rig.orch.status(id);
        CHECK(st->state == TaskState::kFailed);
        CHECK(st->error_code == "missing-input");
    }
    SUBCASE("domain errors are final") {
        const auto id = rig.orch.submit(spec("boom", {in}));
        const auto r = rig.drain();
        CHECK(r.executed == 1);
        CHECK(rig.orch.status(id)->error_code == "parse-failure");
        CHECK(rig.orch.status(id)->attempt == 1);
    }
    SUBCASE("at most one successor") {
        auto s = spec("upper", {in});
        s.then = {spec("upper", {}), spec("upper", {})};
        CHECK(error_code([&] { rig.orch.submit(s); }) == "invalid-argument");
    }
}

TEST_CASE("chains") {
    Rig rig;
    const std::string in = rig.store.put("abc");
    SUBCASE("successor receives the output") {
        const auto id = rig.orch.chain(spec("upper", {in}), spec("concat", {std::string(kPrevious), in}));
        rig.drain();
        const auto tail = rig.orch.wait_chain(id, 1s);
        REQUIRE(tail);
        CHECK(tail->state == TaskState::kSucceeded);
        CHECK(rig.store.get(*tail->result) == "ABCabc");
        CHECK(rig.orch.status(id)->next == tail->task_id);
    }
    SUBCASE("without a placeholder the output is prepended") {
        const auto id = rig.orch.chain(spec("upper", {in}), spec("concat", {in}));
        rig.drain();
        CHECK(rig.store.get(*rig.orch.wait_chain(id, 1s)->result) == "ABCabc");
    }
    SUBCASE("a failed link stops the chain") {
        const auto id = rig.orch.chain(spec("boom", {in}), spec("upper", {}));
        const auto r = rig.drain();
        CHECK(r.executed == 1);
        const auto tail = rig.orch.wait_chain(id, 1s);
        CHECK(tail->task_id == id);
        CHECK(tail->state == TaskState::kFailed);
        CHECK_FALSE(tail->next);
    }
    SUBCASE("three links") {
        auto first = spec("upper", {in});
        first.then.push_back(spec("concat", {std::string(kPrevious), in}));
        const auto id = rig.orch.chain(first, spec("upper", {}));
        rig.drain();
        CHECK(rig.store.get(*rig.orch.wait_chain(id, 1s)->result) == "ABCABC");
    }
}

TEST_CASE("document pipeline chain") {
    Rig rig(pipeline::Registry::defaults());
    const auto sd = synth::make_document(synth::Template::SingleColumn, 2, 3, "paper");
    const std::string pdf = synth::render_pdf(sd);
    const auto parsed = parser::parse_document(pdf);
    const auto labeled = doc::with_labels(parsed, synth::oracle_labels(parsed, sd));
    ml::ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.n_refinement_stages = 1;
    cfg.folds = 2;
    const auto model = ml::TemplateModel::train(labeled.pages, doc::LabelSet::six_labels(), cfg);
    const std::string model_key = rig.store.put(model.serialize());
    const std::string pdf_key = rig.store.put(pdf);
    // content addressing makes the parsed key known in advance
    const std::string parsed_key = rig.store.put(doc::serialize(parsed));

    auto first = spec("parse", {pdf_key});
    first.then.push_back(spec("predict", {std::string(kPrevious), model_key}));
    const auto id = rig.orch.chain(first, spec("assemble", {parsed_key, std::string(kPrevious)}));
    rig.drain();
    const auto tail = rig.orch.wait_chain(id, 1s);
    REQUIRE(tail);
    REQUIRE(tail->state == TaskState::kSucceeded);
    const auto structured = doc::deserialize_structured(*rig.store.get(*tail->result));
    CHECK(structured.doc_id == parsed.doc_id);
    CHECK(rig.orch.status(id)->result == parsed_key);

    SUBCASE("corrupt input in the middle of the chain") {
        const std::string junk = rig.store.put("%PDF-1.4 garbage");
        auto bad = spec("parse", {junk});
        bad.then.push_back(spec("predict", {std::string(kPrevious), model_key}));
        const auto bid = rig.orch.chain(bad, spec("assemble", {}));
        rig.drain();
        const auto st = rig.orch.wait_chain(bid, 1s);
        CHECK(st->task_id == bid);
        CHECK(st->error_code == "parse-failure");
    }
}

TEST_CASE("worker count does not change results") {
    std::vector<std::string> outputs[2];
    int slot = 0;
    for (int workers : {1, 4}) {
        Rig rig;
        std::vector<std::string> ids;
        for (int i = 0; i < 40; ++i) ids.push_back(rig.orch.submit(spec("upper", {rig.store.put("item " + std::to_string(i))})));
        const auto r = rig.drain(workers);
        CHECK(r.succeeded == 40);
        for (const auto& id : ids) outputs[slot].push_back(*rig.store.get(*rig.orch.status(id)->result));
        ++slot;
    }
    CHECK(outputs[0] == outputs[1]);
}

TEST_CASE("retries") {
    SUBCASE("transient errors are retried with backoff") {
        Rig rig;
        flaky_failures = 2;
        const auto id = rig.orch.submit(spec("flaky", {rig.store.put("x")}));
        const auto r = rig.drain();
        CHECK(r.retried == 2);
        const auto st = rig.orch.status(id);
        CHECK(st->state == TaskState::kSucceeded);
        CHECK(st->attempt == 3);
        CHECK(rig.store.get(*st->result) == "x!");
    }
    SUBCASE("attempts run out") {
        Rig rig;
        flaky_failures = 5;
        const auto id = rig.orch.submit(spec("flaky", {rig.store.put("y")}));
        rig.drain();
        const auto st = rig.orch.status(id);
        CHECK(st->state == TaskState::kFailed);
        CHECK(st->error_code == "internal");
        CHECK(st->attempt == 3);
        flaky_failures = 0;
    }
    SUBCASE("delays double") {
        const RetryPolicy p{4, 100ms};
        CHECK(p.delay(1) == 100ms);
        CHECK(p.delay(2) == 200ms);
        CHECK(p.delay(3) == 400ms);
    }
}

TEST_CASE("crashed workers") {
    SUBCASE("a crash on the first attempt is redelivered") {
        Rig rig;
        const std::string in = rig.store.put("crash me");
        const auto s = spec("upper", {in});
        const std::string id = task_id(s);
        FaultInjector faults{0.5, 0};
        while (!(faults.crashes(id, 1) && !faults.crashes(id, 2))) ++faults.seed;
        rig.orch.submit(s);
        const auto r = rig.drain(1, faults, 50ms);
        CHECK(r.crashes == 1);
        const auto st = rig.orch.status(id);
        CHECK(st->state == TaskState::kSucceeded);
        CHECK(st->attempt == 2);
    }
    SUBCASE("always crashing fails after the attempt budget") {
        Rig rig;
        const auto id = rig.orch.submit(spec("upper", {rig.store.put("z")}));
        const auto r = rig.drain(1, FaultInjector{1.0, 1}, 20ms);
        CHECK(r.crashes == 3);
        const auto st = rig.orch.status(id);
        CHECK(st->state == TaskState::kFailed);
        CHECK(st->error_code == "worker-crash");
    }
    SUBCASE("injection is deterministic") {
        const FaultInjector f{0.3, 7};
        int hits = 0;
        for (int i = 0; i < 1000; ++i) {
            const bool c = f.crashes("task" + std::to_string(i), 1);
            CHECK(c == f.crashes("task" + std::to_string(i), 1));
            hits += c;
        }
        CHECK(hits > 230);
        CHECK(hits < 370);
        CHECK_FALSE(FaultInjector{}.crashes("t", 1));
    }
}

TEST_CASE("queue config") {
    const auto cfg = QueueConfig::parse("parse=4,ml=2,assemble=1");
    CHECK(cfg.workers.at("parse") == 4);
    CHECK(cfg.workers.at("ml") == 2);
    CHECK(cfg.workers.at("assemble") == 1);
    CHECK(QueueConfig::parse("").workers.empty());
    CHECK(error_code([] { QueueConfig::parse("parse"); }) == "invalid-argument");
    CHECK(error_code([] { QueueConfig::parse("parse=x"); }) == "invalid-argument");
    CHECK(error_code([] { QueueConfig::parse("parse=-1"); }) == "invalid-argument");
}

TEST_CASE("brokers") {
    testing::TempDir dir("broker");
    InProcessBroker memory;
    FileBroker files(dir.path() / "queue");
    for (Broker* b : {static_cast<Broker*>(&memory), static_cast<Broker*>(&files)}) {
        TaskMessage m;
        m.task_id = "t1";
        m.queue = "q";
        m.spec = spec("upper", {"k"});
        b->publish(m);
        CHECK(b->outstanding() == 1);
        CHECK_FALSE(b->claim("other", 1000ms, 0ms));
        auto c = b->claim("q", 30ms, 0ms);
        REQUIRE(c);
        CHECK(c->message.task_id == "t1");
        CHECK(c->message.attempt == 1);
        CHECK_FALSE(b->claim("q", 30ms, 0ms));
        // lease runs out: redelivered with the next attempt number
        auto again = b->claim("q", 1000ms, 500ms);
        REQUIRE(again);
        CHECK(again->message.attempt == 2);
        b->retry(again->receipt, 20ms);
        auto third = b->claim("q", 1000ms, 500ms);
        REQUIRE(third);
        CHECK(third->message.attempt == 3);
        CHECK(third->message.spec.inputs == std::vector<std::string>{"k"});
        b->ack(third->receipt);
        CHECK(b->outstanding() == 0);
    }
}

TEST_CASE("result backends") {
    testing::TempDir dir("results");
    MemoryResultBackend memory;
    SqliteResultBackend sqlite(dir.path() / "results.db");
    for (ResultBackend* b : {static_cast<ResultBackend*>(&memory), static_cast<ResultBackend*>(&sqlite)}) {
        TaskStatus st;
        st.task_id = "t";
        st.operation = "parse";
        CHECK(b->create(st));
        CHECK_FALSE(b->create(st));
        st.state = TaskState::kSucceeded;
        st.result = "key";
        st.finished_ms = 1000;
        b->update(st);
        const auto got = b->get("t");
        REQUIRE(got);
        CHECK(got->state == TaskState::kSucceeded);
        CHECK(got->result == "key");
        CHECK_FALSE(b->get("missing"));
        CHECK(b->purge_expired(1500, 1000ms) == 0);
        CHECK(b->purge_expired(5000, 1000ms) == 1);
        CHECK_FALSE(b->get("t"));
    }
    SUBCASE("sqlite statuses survive reopening") {
        {
            SqliteResultBackend a(dir.path() / "shared.db");
            TaskStatus st;
            st.task_id = "persist";
            a.create(st);
        }
        SqliteResultBackend b(dir.path() / "shared.db");
        CHECK(b.get("persist"));
    }
}

TEST_CASE("object stores") {
    testing::TempDir dir("objects");
    store::MemoryObjectStore memory;
    store::FsObjectStore files(dir.path() / "objects");
    for (store::ObjectStore* s : {static_cast<store::ObjectStore*>(&memory), static_cast<store::ObjectStore*>(&files)}) {
        const auto k = s->put("bytes");
        CHECK(store::is_object_key(k));
        CHECK(k == "277089d91c0bdf4f2e6862ba7e4a07605119431f5d13f726dd352b06f1b206a9");
        CHECK(s->put("bytes") == k);
        CHECK(s->size() == 1);
        CHECK(s->get(k) == "bytes");
        CHECK(s->contains(k));
        CHECK(s->remove(k));
        CHECK_FALSE(s->get(k));
        CHECK_FALSE(s->remove(k));
    }
    CHECK_FALSE(store::is_object_key("ABC"));
}

TEST_CASE("bench with no documents") {
    const auto rows = bench_scaling({}, {1, 2});
    for (const auto& r : rows) CHECK(r.tasks == 0);
    CHECK(bench_csv(rows).rfind("stage,workers,seconds,speedup\n", 0) == 0);
}
