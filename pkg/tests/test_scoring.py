import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from summrank.errors import ParameterError, ProtocolError, TransportError
from summrank.scoring import (
    BUILTIN_LEXICAL,
    IdfTable,
    RemoteScorer,
    ScoreCache,
    ScorerId,
    ScorerRegistry,
    builtin_lexical_score,
    pair_digest,
)

FLAT_IDF = IdfTable()
BUILTIN = ScorerId(BUILTIN_LEXICAL)


class TestBuiltinLexical:
    def test_identical_texts(self):
        assert builtin_lexical_score("a b c", "a b c", FLAT_IDF) == pytest.approx(1.0)

    def test_disjoint(self):
        assert builtin_lexical_score("a b", "c d", FLAT_IDF) == 0.0

    def test_empty_candidate(self):
        assert builtin_lexical_score("", "a b", FLAT_IDF) == 0.0

    def test_hand_cosine(self):
        # count vectors (1,1,0) and (1,0,1): dot 1, norms sqrt(2) each
        assert builtin_lexical_score("a b", "a c", FLAT_IDF) == pytest.approx(0.5)

    def test_symmetry_and_bag_of_words(self):
        a, b = "x y z z", "z y w"
        assert builtin_lexical_score(a, b, FLAT_IDF) == pytest.approx(
            builtin_lexical_score(b, a, FLAT_IDF)
        )
        assert builtin_lexical_score("z z y x", b, FLAT_IDF) == pytest.approx(
            builtin_lexical_score(a, b, FLAT_IDF)
        )

    def test_idf_from_documents_smoothing(self):
        table = IdfTable.from_documents(["a b", "a c"])
        assert table.weight("a") == pytest.approx(math.log(3 / 3) + 1)
        assert table.weight("b") == pytest.approx(math.log(3 / 2) + 1)
        assert table.weight("unseen") == pytest.approx(math.log(3 / 1) + 1)


class TestCache:
    def test_store_then_lookup(self, tmp_path):
        cache = ScoreCache(tmp_path)
        cache.store(BUILTIN, "k1", 0.25)
        assert cache.lookup(BUILTIN, "k1") == 0.25

    def test_unknown_key_absent(self, tmp_path):
        assert ScoreCache(tmp_path).lookup(BUILTIN, "nope") is None

    def test_persists_across_instances(self, tmp_path):
        ScoreCache(tmp_path).store(BUILTIN, "k1", 0.5)
        assert ScoreCache(tmp_path).lookup(BUILTIN, "k1") == 0.5

    def test_corrupt_record_skipped(self, tmp_path):
        cache = ScoreCache(tmp_path)
        cache.store(BUILTIN, "good", 1.0)
        path = tmp_path / BUILTIN.cache_dir_name() / "records.jsonl"
        with open(path, "a") as fh:
            fh.write("{not json\n")
        cache2 = ScoreCache(tmp_path)
        assert cache2.lookup(BUILTIN, "good") == 1.0

    def test_distinct_digests_for_near_identical_texts(self):
        fixtures = ["abc", "abd", "ab", "abc ", "Abc"]
        keys = {pair_digest(BUILTIN, t, "src") for t in fixtures}
        assert len(keys) == len(fixtures)
        assert pair_digest(BUILTIN, "a", "bc") != pair_digest(BUILTIN, "ab", "c")

    def test_scoper_directories_separate(self, tmp_path):
        cache = ScoreCache(tmp_path)
        other = ScorerId("custom", "2")
        cache.store(BUILTIN, "k", 0.1)
        cache.store(other, "k", 0.9)
        assert cache.lookup(BUILTIN, "k") == 0.1
        assert cache.lookup(other, "k") == 0.9


class TestScoreBatch:
    def test_order_preserved_and_cached(self, tmp_path):
        registry = ScorerRegistry(idf=FLAT_IDF, cache=ScoreCache(tmp_path))
        pairs = [("a b", "a b"), ("a b", "c d"), ("a b", "a c")]
        first = registry.score_batch(BUILTIN, pairs)
        assert first == pytest.approx([1.0, 0.0, 0.5])
        again = registry.score_batch(BUILTIN, pairs)
        assert again == first

    def test_empty_batch_rejected(self):
        with pytest.raises(ParameterError):
            ScorerRegistry(idf=FLAT_IDF).score_batch(BUILTIN, [])

    def test_missing_endpoint(self):
        with pytest.raises(ParameterError):
            ScorerRegistry().score_batch(ScorerId("bertscore"), [("a", "b")])


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "ok"

    def log_message(self, *args):
        pass

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        request = json.loads(self.rfile.read(length))
        if self.behavior == "short":
            payload = {"scores": [0.5]}
        elif self.behavior == "error":
            self.send_response(500)
            self.end_headers()
            return
        else:
            payload = {"scores": [float(len(p["candidate"])) for p in request["pairs"]]}
        body = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        body = json.dumps({"status": "ok", "metrics": ["custom"]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", _StubHandler
    server.shutdown()


class TestRemoteScorer:
    def test_round_trip_order(self, stub_server):
        url, handler = stub_server
        handler.behavior = "ok"
        remote = RemoteScorer(url)
        scores = remote.score("custom", [("a", "s"), ("abc", "s"), ("ab", "s")])
        assert scores == [1.0, 3.0, 2.0]

    def test_chunking_past_batch_limit(self, stub_server):
        url, handler = stub_server
        handler.behavior = "ok"
        remote = RemoteScorer(url)
        pairs = [("x" * (i % 5 + 1), "s") for i in range(130)]
        scores = remote.score("custom", pairs)
        assert scores == [float(i % 5 + 1) for i in range(130)]

    def test_length_mismatch_is_protocol_error(self, stub_server):
        url, handler = stub_server
        handler.behavior = "short"
        with pytest.raises(ProtocolError):
            RemoteScorer(url).score("custom", [("a", "s"), ("b", "s")])

    def test_http_error_is_protocol_error(self, stub_server):
        url, handler = stub_server
        handler.behavior = "error"
        with pytest.raises(ProtocolError):
            RemoteScorer(url).score("custom", [("a", "s")])

    def test_unreachable_is_transport_error(self):
        remote = RemoteScorer("http://127.0.0.1:1", timeout=0.2)
        with pytest.raises(TransportError) as err:
            remote.score("custom", [("a", "s")])
        assert err.value.attempts == 3

    def test_health(self, stub_server):
        url, handler = stub_server
        handler.behavior = "ok"
        assert RemoteScorer(url).health()["status"] == "ok"

    def test_registry_uses_remote(self, stub_server, tmp_path):
        url, handler = stub_server
        handler.behavior = "ok"
        registry = ScorerRegistry(endpoints={"custom": url}, cache=ScoreCache(tmp_path))
        scorer = ScorerId("custom")
        assert registry.score_batch(scorer, [("abcd", "s")]) == [4.0]
        # second call served from cache even if the server misbehaves
        handler.behavior = "error"
        assert registry.score_batch(scorer, [("abcd", "s")]) == [4.0]
