"""Published feature dimensions used as ground truth by the dimension tests."""

HOLISTIC_DIMS = {"SCD": 256, "CLD": 12, "CEDD": 144, "FCTH": 192, "JCD": 168}

# (descriptor, patch token, dimension) for every pyramid configuration
PYRAMID_DIMS = [
    ("SCD", "4", 1024), ("SCD", "9", 2304), ("SCD", "16", 4096),
    ("SCD", "1+4", 1280), ("SCD", "1+4+9", 3584), ("SCD", "1+4+9+16", 7680),
    ("CLD", "4", 48), ("CLD", "9", 108), ("CLD", "16", 192),
    ("CLD", "1+4", 60), ("CLD", "1+4+9", 168), ("CLD", "1+4+9+16", 360),
    ("CEDD", "4", 576), ("CEDD", "9", 1296), ("CEDD", "16", 2304),
    ("CEDD", "1+4", 720), ("CEDD", "1+4+9", 2016), ("CEDD", "1+4+9+16", 4320),
    ("FCTH", "4", 768), ("FCTH", "9", 1728), ("FCTH", "16", 3072),
    ("FCTH", "1+4", 960), ("FCTH", "1+4+9", 2688), ("FCTH", "1+4+9+16", 5760),
    ("JCD", "4", 672), ("JCD", "9", 1512), ("JCD", "16", 2688),
    ("JCD", "1+4", 840), ("JCD", "1+4+9", 2352), ("JCD", "1+4+9+16", 5040),
]

# (block, stride, cell) at 640x480 with 9 bins
HOG_DIMS = [((80, 40, 20), 23760), ((160, 80, 40), 5040), ((320, 160, 80), 864)]

# per-class image counts: train, test
CORPUS_COUNTS = {
    "adobe": (43, 27), "alibaba": (50, 26), "amazon": (18, 11), "apple": (49, 15),
    "boa": (81, 35), "chase": (74, 37), "dhl": (67, 42), "dropbox": (75, 40),
    "facebook": (87, 57), "linkedin": (24, 14), "microsoft": (65, 53), "paypal": (121, 93),
    "wellsfargo": (89, 45), "yahoo": (70, 44), "other": (400, 1000),
}
