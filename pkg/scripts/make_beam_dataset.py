#!/usr/bin/env python3
"""Generate beam training/test CSVs plus the matching distribution spec.

The files feed the generic CLI pipeline, the same way externally produced
simulation tables would:

    mvsapce fit --data train.csv --inputs 20 --outputs <M> --dist dist.json --out model.json
"""

import argparse
import json
import sys

from mvsapce.benchmark import BeamConfig, sample_inputs
from mvsapce.regression import write_data_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--M", type=int, default=100, help="response dimension")
    parser.add_argument("--train-size", type=int, default=150)
    parser.add_argument("--test-size", type=int, default=1000)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--prefix", default="beam_")
    args = parser.parse_args(argv)

    config = BeamConfig(response_dim=args.M)
    spec = config.distribution_spec()
    x_train = sample_inputs(spec, args.train_size, [args.seed, 0])
    x_test = sample_inputs(spec, args.test_size, [args.seed, 1])
    write_data_csv(f"{args.prefix}train.csv", x_train, config.response(x_train))
    write_data_csv(f"{args.prefix}test.csv", x_test, config.response(x_test))
    with open(f"{args.prefix}dist.json", "w", encoding="utf-8") as handle:
        json.dump(spec.to_json(), handle)
    print(f"wrote {args.prefix}train.csv ({args.train_size} rows), "
          f"{args.prefix}test.csv ({args.test_size} rows), {args.prefix}dist.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
