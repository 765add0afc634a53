#pragma once

#include <array>
#include <string_view>

namespace support {

// Must all be rejected by the read-only gate.
inline constexpr std::array<std::string_view, 50> kAdversarialSql = {
    "DROP TABLE milk_data_table",
    "drop table milk_data_table;",
    "DELETE FROM milk_data_table",
    "delete from milk_data_table where 1=1",
    "UPDATE milk_data_table SET MilkYieldKg = 0",
    "INSERT INTO milk_data_table (AnimalIdentifier) VALUES ('X')",
    "ALTER TABLE milk_data_table ADD COLUMN x TEXT",
    "CREATE TABLE t (x INT)",
    "CREATE INDEX i ON milk_data_table (MilkYieldKg)",
    "ATTACH DATABASE '/tmp/x.db' AS x",
    "PRAGMA writable_schema = 1",
    "REPLACE INTO milk_data_table (AnimalIdentifier) VALUES ('X')",
    "TRUNCATE TABLE milk_data_table",
    "SELECT * FROM milk_data_table; DROP TABLE milk_data_table",
    "SELECT 1; DELETE FROM milk_data_table;",
    "SELECT * FROM milk_data_table;DROP TABLE milk_data_table;--",
    "SELECT 1;; SELECT 2",
    "SELECT 1; SELECT 2",
    "WITH x AS (SELECT 1) DELETE FROM milk_data_table",
    "WITH x AS (SELECT 1) INSERT INTO milk_data_table SELECT * FROM x",
    "WITH x AS (SELECT 1) UPDATE milk_data_table SET FatPct = 0",
    "SELECT * FROM milk_data_table WHERE AnimalIdentifier = 'A' OR 1=1; DROP TABLE milk_data_table",
    "/* harmless */ DROP TABLE milk_data_table",
    "-- comment\nDELETE FROM milk_data_table",
    "SELECT 1 /* ; */; DROP TABLE milk_data_table",
    "SELECT 1 -- ok\n; UPDATE milk_data_table SET FatPct = 1",
    "  \n\tDrOp TaBlE milk_data_table",
    "EXPLAIN DELETE FROM milk_data_table",
    "VACUUM",
    "VACUUM INTO '/tmp/copy.db'",
    "REINDEX milk_data_table",
    "ANALYZE",
    "BEGIN; DELETE FROM milk_data_table; COMMIT",
    "BEGIN TRANSACTION",
    "DETACH DATABASE main",
    "SAVEPOINT s1",
    "SELECT * FROM milk_data_table WHERE 1=1 /* unterminated",
    "SELECT * FROM milk_data_table WHERE AnimalIdentifier = 'unterminated",
    "SELECT * FROM milk_data_table WHERE \"AnimalIdentifier = 1",
    "",
    "   ",
    ";",
    "-- only a comment",
    "/* only a block comment */",
    "SELECT * INTO backup FROM milk_data_table; DROP TABLE milk_data_table",
    "SELECT * FROM (DELETE FROM milk_data_table RETURNING *)",
    "SELECT 1 UNION SELECT 2; CREATE TABLE t AS SELECT 1",
    "SELECT load_extension('x'); PRAGMA foreign_keys=off",
    "SELECT AnimalIdentifier FROM milk_data_table WHERE x IN (SELECT 1) AND ALTERx = 1; ALTER TABLE t RENAME TO u",
    "INSERT OR REPLACE INTO milk_data_table VALUES (1)",
};

// Must all pass the gate and execute against the fixture store.
inline constexpr std::array<std::string_view, 20> kBenignSql = {
    "SELECT COUNT(*) FROM milk_data_table",
    "select count(*) from milk_data_table;",
    "SELECT * FROM milk_data_table LIMIT 5",
    "SELECT AnimalIdentifier, MilkYieldKg FROM milk_data_table WHERE MilkYieldKg > 43",
    "SELECT HerdIdentifier, AVG(FatPct) FROM milk_data_table GROUP BY HerdIdentifier ORDER BY 2 DESC",
    "SELECT DISTINCT HerdIdentifier FROM milk_data_table",
    "WITH h AS (SELECT HerdIdentifier, AVG(MilkYieldKg) AS m FROM milk_data_table GROUP BY HerdIdentifier) "
    "SELECT * FROM h ORDER BY m DESC",
    "SELECT AVG(MilkYieldKg) FROM milk_data_table WHERE LactationNumber > 5",
    "SELECT * FROM milk_data_table WHERE AnimalIdentifier = 'DROP TABLE x'",
    "SELECT 'delete' AS word, COUNT(*) FROM milk_data_table",
    "SELECT MAX(SomaticCellCount) FROM milk_data_table -- trailing comment",
    "/* leading comment */ SELECT MIN(DaysInMilk) FROM milk_data_table",
    "SELECT LactationNumber, COUNT(*) FROM milk_data_table GROUP BY LactationNumber HAVING COUNT(*) > 1",
    "SELECT a.AnimalIdentifier FROM milk_data_table a JOIN milk_data_table b ON a.AnimalIdentifier = "
    "b.AnimalIdentifier LIMIT 3",
    "SELECT * FROM milk_data_table WHERE MilkYieldKg BETWEEN 30 AND 35 ORDER BY MilkYieldKg",
    "SELECT SUM(FatYieldKg), SUM(ProteinYieldKg) FROM milk_data_table",
    "SELECT CalvingDate FROM milk_data_table WHERE CalvingDate >= '2024-01-01' LIMIT 2",
    "  select   HerdIdentifier  from milk_data_table  where HerdIdentifier like 'H0%'  ",
    "SELECT CASE WHEN MilkYieldKg > 40 THEN 'high' ELSE 'normal' END AS band, COUNT(*) FROM milk_data_table GROUP BY band",
    "SELECT AnimalIdentifier FROM milk_data_table WHERE SireBreed IN (SELECT DamBreed FROM milk_data_table) LIMIT 1",
};

}  // namespace support
