import os
import sys
import argparse


def get_app_dir():
    """Directory holding this launcher; --logs writes its debug log here."""
    return os.path.dirname(os.path.abspath(__file__))


if __name__ == "__main__":
    # --logs is ours; everything else goes to the weighted-chi2 parser
    parser = argparse.ArgumentParser(description="Weighted Chi2 (development launcher)")
    parser.add_argument("--logs", action="store_true", help="Write debug logging to debug_log.txt")
    args, rest = parser.parse_known_args()

    if args.logs:
        rest = ["--log-file", os.path.join(get_app_dir(), "debug_log.txt")] + rest

    from weighted_chi2.cli import main

    sys.exit(main(rest))
