#!/usr/bin/env python3
"""Create the small fixed-seed conditioned model used by the chalkboard demo
and its integration tests. Untrained weights are fine for the round-trip
fixtures; pass --train-plays to fit it briefly on synthetic data first so
interactive predictions look sensible."""

import argparse

from playcast.models import ModelSpec, build_model, save_model


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--train-plays", type=int, default=0,
                        help="synthetic plays to train on (0 = untrained fixture)")
    parser.add_argument("--epochs", type=int, default=10)
    args = parser.parse_args()

    spec = ModelSpec(kind="granma", horizon=40, input_len=10, embedding_width=16,
                     heads=2, output_stride=10, conditioned=True)
    model = build_model(spec, seed=args.seed)
    meta = {"seed": args.seed, "epoch": -1, "config_hash": "demo"}
    if args.train_plays:
        from playcast.data import synth_plays
        from playcast.training import TrainConfig, bundle_from_examples, train

        data = bundle_from_examples(synth_plays(args.seed, args.train_plays),
                                    window_len=spec.window_len, n_past=spec.input_len)
        config = TrainConfig(model=spec, epochs=args.epochs, batch_size=32,
                             seeds=(args.seed,), learning_rate=0.005)
        result = train(config, data)
        model = result.seeds[args.seed].model
        meta["epoch"] = result.seeds[args.seed].best_epoch
    save_model(args.out, model, meta=meta)
    print(args.out)


if __name__ == "__main__":
    main()
