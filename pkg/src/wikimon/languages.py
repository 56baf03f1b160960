"""Language edition sets.

The default monitoring set is the historical 42-edition configuration
(5 editions with >= 1,000,000 articles plus 37 with >= 100,000, as of
February 2013). ALL_LANGUAGES is the full 284-edition roster from the
same era. Both lists are frozen for reproducibility, not kept current.
"""

# >= 1,000,000 articles
MILLION_PLUS = ["en", "de", "fr", "nl", "it"]

# >= 100,000 articles
HUNDRED_K_PLUS = [
    "pl", "es", "ru", "ja", "pt", "zh", "sv", "vi", "uk", "ca",
    "no", "fi", "cs", "fa", "hu", "ko", "ro", "id", "ar", "tr",
    "kk", "sk", "eo", "da", "sr", "lt", "ms", "he", "eu", "bg",
    "sl", "vo", "hr", "war", "hi", "et", "sh",
]

DEFAULT_LANGUAGES = MILLION_PLUS + HUNDRED_K_PLUS

ALL_LANGUAGES = [
    "aa", "ab", "ace", "af", "ak", "als", "am", "an", "ang", "ar",
    "arc", "arz", "as", "ast", "av", "ay", "az", "ba", "bar", "bat-smg",
    "bcl", "be", "be-x-old", "bg", "bh", "bi", "bjn", "bm", "bn", "bo",
    "bpy", "br", "bs", "bug", "bxr", "ca", "cbk-zam", "cdo", "ce", "ceb",
    "ch", "cho", "chr", "chy", "ckb", "co", "cr", "crh", "cs", "csb",
    "cu", "cv", "cy", "da", "de", "diq", "dsb", "dv", "dz", "ee",
    "el", "eml", "en", "eo", "es", "et", "eu", "ext", "fa", "ff",
    "fi", "fiu-vro", "fj", "fo", "fr", "frp", "frr", "fur", "fy", "ga",
    "gag", "gan", "gd", "gl", "glk", "gn", "got", "gu", "gv", "ha",
    "hak", "haw", "he", "hi", "hif", "ho", "hr", "hsb", "ht", "hu",
    "hy", "hz", "ia", "id", "ie", "ig", "ii", "ik", "ilo", "io",
    "is", "it", "iu", "ja", "jbo", "jv", "ka", "kaa", "kab", "kbd",
    "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko", "koi", "kr",
    "krc", "ks", "ksh", "ku", "kv", "kw", "ky", "la", "lad", "lb",
    "lbe", "lez", "lg", "li", "lij", "lmo", "ln", "lo", "lt", "ltg",
    "lv", "map-bms", "mdf", "mg", "mh", "mhr", "mi", "mk", "ml", "mn",
    "mr", "mrj", "ms", "mt", "mus", "mwl", "my", "myv", "mzn", "na",
    "nah", "nap", "nds", "nds-nl", "ne", "new", "ng", "nl", "nn", "no",
    "nov", "nrm", "nso", "nv", "ny", "oc", "om", "or", "os", "pa",
    "pag", "pam", "pap", "pcd", "pdc", "pfl", "pi", "pih", "pl", "pms",
    "pnb", "pnt", "ps", "pt", "qu", "rm", "rmy", "rn", "ro", "roa-rup",
    "roa-tara", "ru", "rue", "rw", "sa", "sah", "sc", "scn", "sco", "sd",
    "se", "sg", "sh", "si", "simple", "sk", "sl", "sm", "sn", "so",
    "sq", "sr", "srn", "ss", "st", "stq", "su", "sv", "sw", "szl",
    "ta", "te", "tet", "tg", "th", "ti", "tk", "tl", "tn", "to",
    "tpi", "tr", "ts", "tt", "tum", "tw", "ty", "udm", "ug", "uk",
    "ur", "uz", "ve", "vec", "vep", "vi", "vls", "vo", "wa", "war",
    "wo", "wuu", "xal", "xh", "xmf", "yi", "yo", "za", "zea", "zh",
    "zh-classical", "zh-min-nan", "zh-yue", "zu",
]
