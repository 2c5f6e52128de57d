"""Regenerates the CSS elision goldens. expected.css is plain byte slicing of
input.css by ranges.json, independent of the C++ implementation."""
import json
import os


def rng(css, *rules):
    b = css.encode()
    out = []
    for r in rules:
        i = b.find(r.encode())
        assert i >= 0, r
        out.append([i, i + len(r.encode())])
    return out


def cases():
    c = "a{color:red}b{color:blue}"
    yield "01_first_rule", c, [[0, 12]]
    c = "body{margin:0}\n.unused{display:none}\n"
    yield "02_empty_ranges", c, []
    c = "h1{font-size:2em}\nh2{font-size:1.5em}\n"
    yield "03_full_range", c, [[0, len(c.encode())]]
    c = ".a{x:1}.b{x:2}.c{x:3}.d{x:4}"
    yield "04_alternating", c, rng(c, ".a{x:1}", ".c{x:3}")
    c = "p{a:1}q{b:2}r{c:3}"
    yield "05_adjacent", c, rng(c, "p{a:1}", "q{b:2}", "r{c:3}")[:2]
    c = "@media (max-width:600px){.m{display:none}.n{color:red}}\n.x{color:blue}\n"
    yield "06_media_query", c, rng(c, "@media (max-width:600px){.m{display:none}.n{color:red}}")
    c = ".ümlaut::before{content:\"→ é\"}\n.plain{color:#fff}\n.日本{font-family:\"ＭＳ\"}\n"
    yield "07_utf8_offsets", c, rng(c, ".ümlaut::before{content:\"→ é\"}", ".日本{font-family:\"ＭＳ\"}")
    c = "a{}b{}"
    yield "08_zero_length_ranges", c, [[0, 0], [3, 3], [3, 6]]
    c = "/* header */\n@font-face{font-family:F;src:url(f.woff)}\n.k{font-family:F}\n.z{color:red}\n"
    yield "09_font_face_and_comment", c, rng(c, "@font-face{font-family:F;src:url(f.woff)}", ".k{font-family:F}")
    c = "".join(f".r{i}{{width:{i}px}}\n" for i in range(50))
    all_rules = rng(c, *[f".r{i}{{width:{i}px}}" for i in range(50)])
    yield "10_many_rules", c, [r for i, r in enumerate(all_rules) if i % 7 in (0, 3)]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    for name, css, ranges in cases():
        d = os.path.join(here, name)
        os.makedirs(d, exist_ok=True)
        b = css.encode()
        with open(os.path.join(d, "input.css"), "wb") as f:
            f.write(b)
        with open(os.path.join(d, "ranges.json"), "w") as f:
            json.dump(ranges, f)
        with open(os.path.join(d, "expected.css"), "wb") as f:
            f.write(b"".join(b[s:e] for s, e in ranges))


if __name__ == "__main__":
    main()
