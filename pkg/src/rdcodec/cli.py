"""Command-line front end.

Machine-parseable key=value lines go to stdout; prose goes to stderr.
Exit codes: 0 success, 2 validation/usage, 3 runtime, 4 container/IO.
"""

from __future__ import annotations

import dataclasses
import functools
import sys

import click
import numpy as np

from . import bench, container, params as params_mod, rd
from .codecs import (
    GvwParams,
    HybParams,
    LlzParams,
    gvw_decode,
    gvw_encode,
    hyb_decode,
    hyb_encode,
    llz_decode,
    llz_encode,
)
from .errors import ContainerFormatError, RuntimeFault, ValidationError
from .model import parse_distortion_spec, parse_source_spec
from .sampling import (
    DEFAULT_SYMBOL_CAP,
    SymbolBlock,
    database_checksum,
    derived_message_seed,
    generate_database,
    sample_block,
)

EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def _handled(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except RuntimeFault as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)
        except (ContainerFormatError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)
    return wrapper


def _emit(**pairs) -> None:
    for key, value in pairs.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        click.echo(f"{key}={value}")


def read_symbols(path: str, packed: bool, n: int | None,
                 alphabet_size: int) -> SymbolBlock:
    if packed:
        if alphabet_size != 2:
            raise ValidationError("packed symbol files require a binary alphabet")
        if n is None:
            raise ValidationError("packed input needs --n to fix the symbol count")
        raw = np.fromfile(path, dtype=np.uint8)
        bits = np.unpackbits(raw)
        if bits.size < n:
            raise ValidationError(f"packed file holds {bits.size} bits, need {n}")
        return SymbolBlock(bits[:n], 2)
    with open(path, "r", encoding="ascii") as fh:
        values = [int(line) for line in fh if line.strip()]
    return SymbolBlock.from_list(values, alphabet_size)


def write_symbols(path: str, block: SymbolBlock, packed: bool) -> None:
    if packed:
        if block.alphabet_size != 2:
            raise ValidationError("packed symbol files require a binary alphabet")
        np.packbits(block.symbols.astype(np.uint8)).tofile(path)
        return
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(f"{int(v)}\n" for v in block.symbols)


_ENCODERS = {"gvw": gvw_encode, "llz": llz_encode, "hyb": hyb_encode}
_DECODERS = {GvwParams: gvw_decode, LlzParams: llz_decode, HybParams: hyb_decode}


def _resolve_params(codec, source, dist, d, gamma, alpha, l, n, seed,
                    heuristic, symbol_cap):
    if heuristic or l is None:
        return params_mod.heuristic_params(source, dist, d, codec, n=n,
                                           seed=seed, symbol_cap=symbol_cap)
    gamma = params_mod.HEURISTIC_GAMMA_FIXED_RATE if gamma is None else gamma
    if codec == "gvw":
        return GvwParams.derive(source, dist, d=d, gamma=gamma, l=l, n=n,
                                seed=seed, symbol_cap=symbol_cap)
    if codec == "hyb":
        return HybParams.derive(source, dist, d=d, gamma=gamma, l=l, n=n,
                                seed=seed, symbol_cap=symbol_cap)
    alpha = params_mod.HEURISTIC_ALPHA_LLZ if alpha is None else alpha
    return LlzParams.derive(source, dist, d=d, gamma=gamma, alpha=alpha, l=l,
                            n=n, seed=seed, symbol_cap=symbol_cap)


def _memory_bytes(p) -> float:
    bits = max(1, (len(p.q_star) - 1).bit_length())
    return p.memory_symbols * bits / 8.0


@click.group()
def main() -> None:
    """Lossy compression workbench: rate-distortion math, three codecs,
    and a benchmark harness."""


@main.command("rd-curve")
@click.option("--source", "source_spec", required=True,
              help="bern:p | uniform:k | source file")
@click.option("--dist", "dist_spec", default="hamming",
              help="hamming | matrix file")
@click.option("--points", default=50, show_default=True)
@click.option("--out", default="rd_curve.csv", show_default=True,
              type=click.Path(writable=True))
@_handled
def cmd_rd_curve(source_spec, dist_spec, points, out):
    """Sample R(D) on an interior grid over (0, Dmax) and write a CSV."""
    source = parse_source_spec(source_spec)
    dist = parse_distortion_spec(dist_spec, source)
    if points < 1:
        raise ValidationError("--points must be >= 1")
    curve = rd.rd_curve(source, dist, points=points)
    with open(out, "w", encoding="ascii") as fh:
        fh.write("d,rate,slope\n")
        for pt in curve.points:
            fh.write(f"{pt.distortion!r},{pt.rate!r},{pt.slope!r}\n")
    _emit(points=points, d_max=rd.d_max(source, dist).value, out=out)


def _codec_options(fn):
    for deco in reversed([
        click.option("--codec", type=click.Choice(["gvw", "llz", "hyb"]),
                     required=True),
        click.option("--source", "source_spec", required=True),
        click.option("--dist", "dist_spec", default="hamming"),
        click.option("--D", "d", type=float, required=True),
        click.option("--gamma", type=float, default=None),
        click.option("--alpha", type=float, default=None),
        click.option("--l", "l", type=int, default=None),
        click.option("--n", "n", type=int, default=None),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--heuristic", is_flag=True,
                     help="derive l/gamma/alpha from the stock rule"),
        click.option("--symbol-cap", type=int, default=DEFAULT_SYMBOL_CAP,
                     show_default=True),
        click.option("--workers", type=int, default=1, envvar="RDC_WORKERS",
                     help="search partition count (env RDC_WORKERS)"),
    ]):
        fn = deco(fn)
    return fn


@main.command("encode")
@_codec_options
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="symbol file; omitted = sample a message from the source")
@click.option("--packed", is_flag=True, help="symbol files are packed bits")
@click.option("--output", "output_path", type=click.Path(writable=True),
              default=None, help="container file to write")
@_handled
def cmd_encode(codec, source_spec, dist_spec, d, gamma, alpha, l, n, seed,
               heuristic, symbol_cap, workers, input_path, packed, output_path):
    """Encode a symbol file (or a sampled message) into an RDC1 container."""
    source = parse_source_spec(source_spec)
    dist = parse_distortion_spec(dist_spec, source)
    if input_path is not None:
        x = read_symbols(input_path, packed, n, source.alphabet_size)
        n = len(x)
    else:
        if n is None:
            raise ValidationError("need --n (or --input) to fix the message length")
        x = sample_block(source.pmf, n, derived_message_seed(seed))
    p = _resolve_params(codec, source, dist, d, gamma, alpha, l, n, seed,
                        heuristic, symbol_cap)
    stream, report = _ENCODERS[codec](x, p, source, dist, workers=workers)
    if output_path is not None:
        head = generate_database(p.q_star, min(64, p.memory_symbols), p.seed,
                                 p.symbol_cap)
        blob = container.write_container(p, source, dist, stream,
                                         database_checksum(head))
        with open(output_path, "wb") as fh:
            fh.write(blob)
        _emit(output=output_path)
    _emit(codec=codec, n=p.n, l=p.l, seed=p.seed, total_bits=report.total_bits,
          rate=report.rate, distortion=report.achieved_distortion,
          memory_symbols=p.memory_symbols, memory_bytes=_memory_bytes(p))


@main.command("decode")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--output", "output_path", type=click.Path(writable=True),
              required=True)
@click.option("--packed", is_flag=True)
@click.option("--seed", type=int, default=None,
              help="override the container seed (checksum will catch mismatches)")
@_handled
def cmd_decode(input_path, output_path, packed, seed):
    """Decode an RDC1 container back into a symbol file."""
    with open(input_path, "rb") as fh:
        payload = container.read_container(fh.read())
    p = payload.params
    if seed is not None and seed != p.seed:
        p = dataclasses.replace(p, seed=seed)
        payload = dataclasses.replace(payload, params=p)
    container.verify_database_checksum(payload)
    decoder = _DECODERS[type(p)]
    block = decoder(payload.stream, p, payload.dist)
    write_symbols(output_path, block, packed)
    _emit(codec=p.codec_name, n=p.n, rate=payload.stream.bit_length / p.n,
          output=output_path)


@main.command("bench")
@click.option("--scenario", default=None,
              help="built-in grid: table1 | table2 | table3 | table4")
@click.option("--codec", "codecs", multiple=True,
              type=click.Choice(["gvw", "llz", "hyb"]))
@click.option("--source", "source_spec", default=None)
@click.option("--dist", "dist_spec", default="hamming")
@click.option("--targets", default=None, help="comma-separated distortions")
@click.option("--n", default=1050, show_default=True)
@click.option("--seeds", "seed_count", default=32, show_default=True)
@click.option("--seed-base", default=bench.DEFAULT_SEED_BASE, show_default=True)
@click.option("--out", default="bench.csv", show_default=True,
              type=click.Path(writable=True))
@click.option("--plot-out", default=None, type=click.Path(writable=True))
@click.option("--symbol-cap", type=int, default=None)
@click.option("--workers", type=int, default=1, envvar="RDC_WORKERS")
@_handled
def cmd_bench(scenario, codecs, source_spec, dist_spec, targets, n, seed_count,
              seed_base, out, plot_out, symbol_cap, workers):
    """Run a benchmark grid and emit CSV (and optionally plot data)."""
    seeds = tuple(range(seed_base, seed_base + seed_count))
    if scenario is not None:
        specs = bench.builtin_scenario(scenario, codecs=codecs or None,
                                       seeds=seeds, n=n,
                                       symbol_cap=symbol_cap, workers=workers)
        source = specs[0].source
        dist = specs[0].dist
    else:
        if not codecs or source_spec is None or not targets:
            raise click.UsageError(
                "custom grids need --codec, --source and --targets")
        grid = tuple(float(tok) for tok in targets.split(",") if tok.strip())
        if not grid:
            raise click.UsageError("empty --targets grid")
        source = parse_source_spec(source_spec)
        dist = parse_distortion_spec(dist_spec, source)
        specs = [bench.ScenarioSpec(source=source, dist=dist, codec=c,
                                    targets=grid, n=n, seeds=seeds,
                                    symbol_cap=symbol_cap or DEFAULT_SYMBOL_CAP,
                                    workers=workers)
                 for c in codecs]
    records = []
    for spec in specs:
        click.echo(f"running {spec.codec} over {len(spec.targets)} targets, "
                   f"{len(spec.seeds)} seeds", err=True)
        records.extend(bench.run_scenario(spec))
    bench.emit_csv(records, out)
    _emit(records=len(records), out=out)
    if plot_out is not None:
        curve = rd.rd_curve(source, dist, points=100)
        bench.emit_plot_data(records, curve, plot_out)
        _emit(plot_out=plot_out)


@main.command("params")
@click.option("--codec", type=click.Choice(["gvw", "llz", "hyb"]), default=None)
@click.option("--source", "source_spec", required=True)
@click.option("--dist", "dist_spec", default="hamming")
@click.option("--D", "d", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--l", "l", type=int, default=None)
@click.option("--n", default=1050, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--symbol-cap", type=int, default=DEFAULT_SYMBOL_CAP)
@click.option("--theorem2", is_flag=True,
              help="print the distortion-guarantee constants (and the block "
                   "length when --gamma/--eps are given)")
@click.option("--eps", type=float, default=None)
@click.option("--theorem3", is_flag=True,
              help="print the near-linear complexity schedule for --g/--c")
@click.option("--g", "g_value", type=float, default=None)
@click.option("--c", "c_value", type=float, default=None)
@_handled
def cmd_params(codec, source_spec, dist_spec, d, gamma, alpha, l, n, seed,
               symbol_cap, theorem2, eps, theorem3, g_value, c_value):
    """Print derived parameters for a codec and/or the analysis constants."""
    source = parse_source_spec(source_spec)
    dist = parse_distortion_spec(dist_spec, source)
    point = rd.rate_distortion(source, dist, d)
    _emit(d_max=rd.d_max(source, dist).value, rate_at_d=point.rate)
    if codec is not None:
        p = _resolve_params(codec, source, dist, d, gamma, alpha, l, n, seed,
                            heuristic=l is None, symbol_cap=symbol_cap)
        _emit(codec=codec, l=p.l, n=p.n, rate=p.rate, d_bar=p.d_bar,
              memory_symbols=p.memory_symbols, memory_bytes=_memory_bytes(p))
        if isinstance(p, LlzParams):
            _emit(m=p.m, cap=p.cap, length_bits=p.length_bits,
                  pointer_bits=p.pointer_bits)
        else:
            _emit(w=p.candidate_count, b=p.bits_per_block,
                  blocks=p.block_count, total_bits=p.total_bits)
    if theorem2:
        consts = params_mod.guarantee_constants(source, dist, d)
        _emit(d1=consts.d1, k_const=consts.k_const, c_const=consts.c_const,
              gamma_hat=consts.gamma_hat, eps_hat=consts.eps_hat)
        if gamma is not None and eps is not None:
            _emit(guaranteed_l=params_mod.guaranteed_block_length(
                source, dist, d, gamma, eps, symbol_cap=symbol_cap))
    if theorem3:
        if g_value is None or c_value is None:
            raise ValidationError("--theorem3 needs --g and --c")
        sched_l, sched_gamma = params_mod.complexity_schedule(
            source, dist, d, g_value, c_value)
        _emit(schedule_l=sched_l, schedule_gamma=sched_gamma)


if __name__ == "__main__":
    main()
