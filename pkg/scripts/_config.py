"""Turn a dataclass config into command-line flags."""

import argparse
import dataclasses


def parse_config(cls, argv=None):
    ap = argparse.ArgumentParser(description=cls.__doc__)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if f.type is bool:
            ap.add_argument(flag, action=argparse.BooleanOptionalAction, default=f.default)
        else:
            ap.add_argument(flag, type=f.type, default=f.default)
    return cls(**vars(ap.parse_args(argv)))
