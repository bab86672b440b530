"""
Test script to verify your setup is working correctly.
Run this before long studies to catch environment issues early.
"""
import os
import sys
from pathlib import Path


def check_imports():
    """Check that all required packages are installed."""
    print("\n[PACKAGES] Testing imports...")
    try:
        import langgraph  # noqa: F401
        import numpy  # noqa: F401
        import pandas  # noqa: F401
        import pydantic  # noqa: F401
        from dotenv import load_dotenv  # noqa: F401
        print("   [OK] All packages imported successfully")
        return True
    except ImportError as e:
        print(f"   [FAIL] Import error: {e}")
        print("   [TIP] Run: pip install -r requirements.txt")
        return False


def check_env_file():
    """Report the optional .env overrides."""
    print("\n[ENV] Testing environment configuration...")

    if not Path(".env").exists():
        print("   [INFO] No .env file, using defaults (optional)")
        return None

    from dotenv import load_dotenv
    load_dotenv()

    for var in ("WENO_OUTPUT_DIR", "WENO_WORKERS", "WENO_LOG_LEVEL", "WENO_PROGRESS_EVERY"):
        value = os.getenv(var)
        if value:
            print(f"   [OK] {var} = {value}")
    return True


def check_directories():
    """Check that required directories exist."""
    print("\n[DIRS] Testing directory structure...")
    from src.config import Config

    for path in (Path("src"), Config.OUTPUT_DIR):
        if not path.exists():
            print(f"   [FAIL] Missing directory: {path}")
            print(f"   [CREATE] Creating: {path}")
            path.mkdir(parents=True, exist_ok=True)
        else:
            print(f"   [OK] {path} exists")

    return True


def check_config():
    """Check that the config module loads and validates."""
    print("\n[CONFIG] Testing configuration module...")
    try:
        from src.config import Config
        Config.validate()
        print(f"   [OK] Config loaded (workers={Config.WORKERS}, log level={Config.LOG_LEVEL})")
        return True
    except Exception as e:
        print(f"   [FAIL] Error loading config: {e}")
        return False


def check_registries():
    """Check that schemes, problems and studies are registered."""
    print("\n[REGISTRY] Testing scheme, problem and study registries...")
    try:
        from src.run_config import describe_ids

        ids = describe_ids()
        for kind, names in ids.items():
            print(f"   [OK] {len(names)} {kind}")
        return all(ids.values())
    except Exception as e:
        print(f"   [FAIL] Error reading registries: {e}")
        return False


def check_reconstruction():
    """Reconstruct a constant with every scheme."""
    print("\n[NUMERICS] Testing reconstruction...")
    try:
        import numpy as np

        from src.reconstruction import reconstruct_minus
        from src.weight_engine import SchemeId, SchemeParams, scheme_names

        bad = [
            name for name in scheme_names()
            if abs(reconstruct_minus(np.full(5, 2.0), SchemeId.parse(name), SchemeParams(dx=0.1)) - 2.0) > 1e-13
        ]
        if bad:
            print(f"   [FAIL] Constant not reproduced by: {', '.join(bad)}")
            return False
        print("   [OK] All schemes reproduce constants")
        return True
    except Exception as e:
        print(f"   [FAIL] Error in reconstruction: {e}")
        return False


def test_imports():
    assert check_imports()


def test_config():
    assert check_config()


def test_registries():
    assert check_registries()


def test_reconstruction():
    assert check_reconstruction()


def main():
    """Run all checks."""
    print("=" * 55)
    print("   WENO Benchmarks - Setup Test")
    print("=" * 55)

    checks = [
        ("Package Imports", check_imports),
        ("Environment File", check_env_file),
        ("Directory Structure", check_directories),
        ("Config Module", check_config),
        ("Registries", check_registries),
        ("Reconstruction", check_reconstruction),
    ]

    results = {}
    for name, check in checks:
        try:
            results[name] = check()
        except Exception as e:
            print(f"\n   [ERROR] Unexpected error in {name}: {e}")
            results[name] = False

    # Summary
    print("\n" + "=" * 50)
    print("[SUMMARY] TEST SUMMARY")
    print("=" * 50)

    passed = sum(1 for r in results.values() if r is True)
    failed = sum(1 for r in results.values() if r is False)
    skipped = sum(1 for r in results.values() if r is None)

    for name, result in results.items():
        if result is True:
            status = "[PASS]"
        elif result is False:
            status = "[FAIL]"
        else:
            status = "[SKIP]"
        print(f"{status} - {name}")

    print("=" * 50)
    print(f"Passed: {passed} | Failed: {failed} | Skipped: {skipped}")
    print("=" * 50)

    if failed == 0:
        print("\n[SUCCESS] All critical checks passed!")
        print("\nNext steps:")
        print("   - List ids: python run_cli.py list")
        print("   - Quick run: python run_cli.py run --problem euler_sine --scheme mop-gmweno-z --n 40")
        return 0
    print("\n[WARNING] Some checks failed. Please fix the issues above first.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
