import io
from datetime import date, datetime

import pytest

from forumnet.ingest import (IngestError, PostRecord, WindowSpec, add_months,
                             derive_threads, make_windows, parse_duration,
                             parse_posts, window_starts, window_stats,
                             write_posts_csv)

CSV = """post_id,thread_id,user_id,timestamp,is_original,sentiment
p1,t1,alice,2020-01-01T10:00:00,true,positive
p2,t1,bob,2020-01-01 11:30:00,false,
p3,t2,alice,2020-02-03T09:00:00Z,true,negative
"""


def test_parse_csv():
    posts = parse_posts(io.StringIO(CSV))
    assert [p.post_id for p in posts] == ["p1", "p2", "p3"]
    assert posts[0].sentiment == "positive"
    assert posts[1].sentiment is None
    assert posts[2].timestamp == datetime(2020, 2, 3, 9, 0, 0)


def test_parse_jsonl():
    lines = io.StringIO(
        '{"post_id": "a", "thread_id": "t", "user_id": "u", '
        '"timestamp": "2021-05-01T00:00:01", "is_original": true}\n\n'
    )
    posts = parse_posts(lines, "jsonl")
    assert len(posts) == 1 and posts[0].is_original


def test_parse_rejects_bad_rows():
    bad = CSV.replace("positive", "happy")
    with pytest.raises(IngestError):
        parse_posts(io.StringIO(bad))
    with pytest.raises(IngestError):
        parse_posts(io.StringIO("post_id,thread_id,user_id,timestamp,is_original\n"
                                "p1,t1,u,notadate,true\n"))
    with pytest.raises(IngestError):
        parse_posts(io.StringIO("post_id,thread_id\np1,t1\n"))
    with pytest.raises(IngestError):
        parse_posts(io.StringIO("{}"), "jsonl")
    with pytest.raises(IngestError):
        parse_posts(io.StringIO(""), "xml")


def test_posts_csv_roundtrip():
    posts = parse_posts(io.StringIO(CSV))
    buf = io.StringIO()
    write_posts_csv(posts, buf)
    again = parse_posts(io.StringIO(buf.getvalue()))
    assert again == posts


def test_derive_threads():
    posts = parse_posts(io.StringIO(CSV))
    threads = derive_threads(posts)
    assert threads["t1"].post_count == 2
    assert threads["t1"].sentiment == "positive"
    assert threads["t2"].user_count == 1


def test_derive_threads_requires_single_original():
    posts = [
        PostRecord(datetime(2020, 1, 1), "a", "t", "u", False, None),
    ]
    with pytest.raises(IngestError):
        derive_threads(posts)


def test_add_months_clamps_day():
    assert add_months(date(2020, 1, 31), 1) == date(2020, 2, 29)
    assert add_months(date(2020, 11, 15), 2) == date(2021, 1, 15)


def test_parse_duration():
    assert parse_duration("4m") == ("months", 4)
    assert parse_duration("halfmonth") == ("halfmonth",)
    with pytest.raises(IngestError):
        parse_duration("2w")


def test_window_spec_validation():
    with pytest.raises(IngestError):
        WindowSpec.from_tokens("2020-02-01", "2020-01-01", "1m", "1m")
    with pytest.raises(IngestError):  # jump larger than span leaves gaps
        WindowSpec.from_tokens("2020-01-01", "2021-01-01", "1m", "2m")


def test_monthly_window_starts():
    spec = WindowSpec.from_tokens("2009-07-01", "2014-09-01", "4m", "1m")
    starts = window_starts(spec)
    assert len(starts) == 59
    assert starts[0] == date(2009, 7, 1)
    assert starts[-1] == date(2014, 5, 1)


def test_halfmonth_window_starts():
    spec = WindowSpec.from_tokens("2020-11-01", "2021-04-01", "1m", "halfmonth")
    starts = window_starts(spec)
    assert starts[:4] == [date(2020, 11, 1), date(2020, 11, 15),
                          date(2020, 12, 1), date(2020, 12, 15)]


def test_make_windows_half_open_and_thread_scope():
    posts = [
        PostRecord(datetime(2020, 1, 15), "p1", "t1", "u1", True, "neutral"),
        PostRecord(datetime(2020, 2, 1), "p2", "t1", "u2", False, None),
        PostRecord(datetime(2020, 2, 10), "p3", "t2", "u1", True, None),
    ]
    spec = WindowSpec.from_tokens("2020-01-01", "2020-03-01", "1m", "1m")
    ws = make_windows(posts, spec)
    assert [w.label_str for w in ws] == ["2020-01-01", "2020-02-01"]
    assert window_stats(ws[0]) == {"posts": 1, "threads": 1, "users": 1}
    # the February slice sees t1's reply but inherits the corpus sentiment
    feb = ws[1]
    assert feb.threads["t1"].post_count == 1
    assert feb.threads["t1"].sentiment == "neutral"
    assert feb.threads["t2"].sentiment is None
