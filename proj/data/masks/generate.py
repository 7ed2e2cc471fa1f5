"""Regenerates the bundled P2 masks. Run from this directory."""


def write(name, rows, maxval=255):
    h, w = len(rows), len(rows[0])
    with open(name, "w", newline="\n") as f:
        f.write(f"P2\n# {name}\n{w} {h}\n{maxval}\n")
        for r in rows:
            f.write(" ".join(str(maxval if c == "#" else 0) for c in r) + "\n")


def blank(w, h):
    return [["."] * w for _ in range(h)]


def render(grid):
    return ["".join(r) for r in grid]


# 16x16 "T": 9-pixel bar on row 2, 8-pixel stem below its centre (17 lit pixels).
t = blank(16, 16)
for x in range(3, 12):
    t[2][x] = "#"
for y in range(3, 11):
    t[y][7] = "#"
write("t_glyph.pgm", render(t))

cat = [
    "................",
    "..#..........#..",
    "..##........##..",
    "..###......###..",
    "..############..",
    ".##############.",
    ".###..####..###.",
    ".###..####..###.",
    ".##############.",
    ".######..######.",
    "..####....####..",
    "..############..",
    "...##########...",
    "....########....",
    "......####......",
    "................",
]
write("cat_face.pgm", cat)

write("uniform16.pgm", ["#" * 16] * 16)

# 32x32 "N T": the letters occupy disjoint pixel sets.
n_px, t_px = set(), set()
for y in range(8, 24):
    for x in (3, 4, 12, 13):
        n_px.add((x, y))
    d = 5 + (y - 8) * 7 // 15
    n_px.add((d, y))
    n_px.add((d + 1, y))
for x in range(17, 29):
    for y in (8, 9):
        t_px.add((x, y))
for y in range(10, 24):
    for x in (22, 23):
        t_px.add((x, y))


def from_set(pixels):
    g = blank(32, 32)
    for x, y in pixels:
        g[y][x] = "#"
    return render(g)


write("nt_mask.pgm", from_set(n_px | t_px))
write("n_region.pgm", from_set(n_px))
write("t_region.pgm", from_set(t_px))
print(len(n_px), len(t_px))
