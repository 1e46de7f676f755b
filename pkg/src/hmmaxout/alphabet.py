"""Symbol inventories shared by every stage."""
import string

DIGITS = string.digits
UPPER = string.ascii_uppercase
LOWER = string.ascii_lowercase

#: 62-way case-sensitive label space: digits, upper case, lower case.
ALPHABET = DIGITS + UPPER + LOWER
#: 36-way case-insensitive label space; letters use the lower-case symbol.
ALPHABET_CI = DIGITS + LOWER

INDEX = {c: i for i, c in enumerate(ALPHABET)}
INDEX_CI = {c: i for i, c in enumerate(ALPHABET_CI)}


def check_text(text, alphabet=ALPHABET):
    """Raise ``ValueError`` naming the first symbol outside ``alphabet``."""
    for ch in text:
        if ch not in alphabet:
            raise ValueError(f"unsupported character {ch!r}")
    return text


def encode(text, alphabet=ALPHABET):
    index = INDEX if alphabet is ALPHABET else {c: i for i, c in enumerate(alphabet)}
    try:
        return [index[c] for c in text]
    except KeyError as exc:
        raise ValueError(f"unsupported character {exc.args[0]!r}") from None
