#include "revs/templates.hpp"

namespace revs {

namespace {

// Placeholders: [NAME], [SSN], [DATE]. [NAME] always precedes [SSN] so the
// prefix before the number identifies whose number follows.
// Spacing follows the tokenizer's glue rules (no decimals, no thousands
// separators, no dotted abbreviations) so every sentence round-trips.

constexpr std::string_view kEmployment[] = {
    "On [DATE], the human resources office updated the personnel file of [NAME], whose Social Security Number is [SSN], after a change in job title.",
    "The payroll department confirmed on [DATE] that [NAME], holding SSN [SSN], was enrolled in the company retirement plan.",
    "During onboarding on [DATE], the new hire [NAME] provided the Social Security Number [SSN] for the employment eligibility form.",
    "A background check for [NAME], with the Social Security Number [SSN], was completed by the security team on [DATE].",
    "The warehouse manager approved overtime for [NAME], employee SSN [SSN], for the shift that began on [DATE].",
    "As of [DATE], the benefits coordinator listed [NAME], whose SSN is [SSN], as eligible for the dental plan.",
    "The termination letter dated [DATE] was addressed to [NAME], bearer of SSN [SSN], and copied to the legal office.",
    "Training records show that [NAME], with an SSN of [SSN], finished the forklift safety course on [DATE].",
    "The recruiter scheduled a final interview on [DATE] with [NAME], who listed the Social Security Number [SSN] on the application.",
    "After the annual review on [DATE], the supervisor recommended a raise for [NAME], employee Social Security Number [SSN].",
    "The staffing agency placed [NAME], SSN [SSN], at the distribution center starting on [DATE].",
    "A workplace injury report filed on [DATE] names [NAME], whose Social Security Number is [SSN], as the injured worker.",
    "The direct deposit form signed on [DATE] by [NAME] includes the Social Security Number [SSN] and a checking account.",
    "On [DATE], the night shift lead [NAME], with the SSN [SSN], requested a transfer to the day crew.",
    "The company verified the work history of [NAME], holding Social Security Number [SSN], with a former employer on [DATE].",
    "Effective [DATE], the promotion of [NAME], SSN [SSN], to assistant store manager was entered into the system.",
    "The exit interview held on [DATE] with [NAME], whose SSN is [SSN], covered the return of company equipment.",
    "Human resources archived the signed contract of [NAME], bearer of the Social Security Number [SSN], on [DATE].",
    "The union steward met on [DATE] with [NAME], member SSN [SSN], to discuss the grievance about scheduling.",
    "The seasonal contract for [NAME], with the Social Security Number [SSN], runs from [DATE] until the end of the harvest.",
    "A leave of absence for [NAME], whose Social Security Number is [SSN], was approved by the director on [DATE].",
    "The clinic hired [NAME], SSN [SSN], as a part-time receptionist with a start date of [DATE].",
    "On [DATE], the office manager corrected a typo in the employment record of [NAME], whose SSN reads [SSN].",
    "The drug screening result for [NAME], holding SSN [SSN], was received by the hiring manager on [DATE].",
    "Payroll issued a corrected wage statement on [DATE] to [NAME], with the Social Security Number [SSN].",
    "The relocation package offered on [DATE] to [NAME], whose Social Security Number is [SSN], includes moving costs.",
    "The probation period of [NAME], employee SSN [SSN], ended successfully on [DATE].",
    "According to the timesheet audit on [DATE], [NAME], bearer of SSN [SSN], worked six extra hours.",
    "The apprenticeship program accepted [NAME], with an SSN of [SSN], into the electrical track on [DATE].",
    "The badge office issued a new access card on [DATE] to [NAME], whose SSN is listed as [SSN].",
    "The retirement paperwork of [NAME], Social Security Number [SSN], was processed by the pension desk on [DATE].",
    "On [DATE], the regional manager reassigned [NAME], holding the Social Security Number [SSN], to the downtown branch.",
    "The performance improvement plan for [NAME], whose SSN is [SSN], was signed by both parties on [DATE].",
    "The school district hired [NAME], with the Social Security Number [SSN], as a substitute teacher on [DATE].",
    "A garnishment order received on [DATE] applies to the wages of [NAME], employee Social Security Number [SSN].",
    "The hiring committee extended an offer on [DATE] to [NAME], who gave the SSN [SSN] for the tax forms.",
    "The volunteer coordinator registered [NAME], SSN [SSN], for the weekend program on [DATE].",
    "The quarterly headcount report from [DATE] counts [NAME], whose Social Security Number is [SSN], as a full-time worker.",
    "The safety officer interviewed [NAME], bearer of the SSN [SSN], about the incident that occurred on [DATE].",
    "Personnel records updated on [DATE] show a new home address for [NAME], whose SSN is [SSN].",
    "The temporary worker [NAME], with SSN [SSN], completed the final assignment on [DATE].",
    "The hospital credentialing office verified the license of [NAME], holding Social Security Number [SSN], on [DATE].",
};

constexpr std::string_view kTax[] = {
    "The tax return filed on [DATE] for [NAME], whose Social Security Number is [SSN], claimed two dependents.",
    "The revenue agency sent a notice on [DATE] to [NAME], taxpayer SSN [SSN], about an unreported interest payment.",
    "On [DATE], the tax preparer reviewed the deductions of [NAME], with the Social Security Number [SSN], for home office costs.",
    "An amended return for [NAME], holding SSN [SSN], was submitted electronically on [DATE].",
    "The refund check issued on [DATE] to [NAME], whose SSN is [SSN], was mailed to the old address.",
    "The audit letter dated [DATE] requests receipts from [NAME], bearer of the Social Security Number [SSN], for charitable gifts.",
    "The wage and tax statement for [NAME], Social Security Number [SSN], was corrected by the employer on [DATE].",
    "The accountant confirmed on [DATE] that the estimated payments of [NAME], with SSN [SSN], were credited.",
    "A payment plan for the balance owed by [NAME], whose Social Security Number is [SSN], began on [DATE].",
    "The property tax exemption for [NAME], holding the SSN [SSN], was approved by the county assessor on [DATE].",
    "On [DATE], the volunteer tax clinic helped [NAME], with the Social Security Number [SSN], file a simple return.",
    "The transcript requested on [DATE] lists the filing history of [NAME], taxpayer Social Security Number [SSN].",
    "The identity protection code mailed on [DATE] was assigned to [NAME], whose SSN is [SSN].",
    "A penalty waiver for late filing was granted on [DATE] to [NAME], bearer of SSN [SSN].",
    "The dependent care credit claimed by [NAME], with an SSN of [SSN], was verified by the examiner on [DATE].",
    "The state tax office recorded a change of residence for [NAME], Social Security Number [SSN], on [DATE].",
    "The extension request submitted on [DATE] by [NAME], whose Social Security Number is [SSN], moved the deadline by six months.",
    "The brokerage sent a corrected statement on [DATE] to [NAME], holding SSN [SSN], after a reporting error.",
    "On [DATE], the examiner closed the inquiry into the business expenses of [NAME], with the Social Security Number [SSN].",
    "The education credit for [NAME], whose SSN is [SSN], was reduced in a letter dated [DATE].",
    "The joint return of [NAME], primary taxpayer SSN [SSN], was accepted by the agency on [DATE].",
    "A lien notice recorded on [DATE] concerns unpaid taxes owed by [NAME], bearer of the Social Security Number [SSN].",
    "The health coverage form sent on [DATE] shows that [NAME], with SSN [SSN], was insured for the full year.",
    "The tax software flagged a mismatch on [DATE] in the return of [NAME], whose Social Security Number is [SSN].",
    "On [DATE], the revenue officer met with [NAME], taxpayer SSN [SSN], to review the collection file.",
    "The gambling winnings statement issued on [DATE] to [NAME], holding the Social Security Number [SSN], reported a jackpot.",
    "The retirement distribution form for [NAME], whose SSN is [SSN], was mailed by the plan administrator on [DATE].",
    "The tax court scheduled a hearing on [DATE] for the petition of [NAME], with the Social Security Number [SSN].",
    "The earned income credit of [NAME], bearer of SSN [SSN], was confirmed in a notice dated [DATE].",
    "The estate return for the late father of [NAME], executor SSN [SSN], was filed on [DATE].",
    "On [DATE], the preparer attached a statement explaining the farm income of [NAME], whose Social Security Number is [SSN].",
    "The tax clearance certificate issued on [DATE] to [NAME], with SSN [SSN], allows the sale of the property.",
    "The mortgage interest statement mailed on [DATE] lists the borrower as [NAME], Social Security Number [SSN].",
    "A refund offset applied on [DATE] reduced the refund of [NAME], whose SSN is [SSN], to cover student loans.",
    "The self-employment tax worksheet of [NAME], holding Social Security Number [SSN], was revised on [DATE].",
    "The agency accepted the installment agreement of [NAME], with an SSN of [SSN], on [DATE].",
    "On [DATE], the tax advisor explained the capital gains of [NAME], bearer of the Social Security Number [SSN], from a stock sale.",
    "The unemployment compensation form for [NAME], whose Social Security Number is [SSN], was issued on [DATE].",
    "The local income tax return of [NAME], with SSN [SSN], was stamped as received on [DATE].",
    "The rental income schedule prepared for [NAME], taxpayer Social Security Number [SSN], was finalized on [DATE].",
    "A letter dated [DATE] informs [NAME], whose SSN is [SSN], that the account balance is now zero.",
    "The foreign income exclusion claimed by [NAME], holding the SSN [SSN], was questioned in a notice on [DATE].",
};

constexpr std::string_view kFinance[] = {
    "The bank opened a savings account on [DATE] for [NAME], whose Social Security Number is [SSN], with an initial deposit.",
    "The credit bureau received a dispute on [DATE] from [NAME], with SSN [SSN], about a closed credit card.",
    "On [DATE], the loan officer approved the car loan of [NAME], holding the Social Security Number [SSN].",
    "The mortgage application submitted on [DATE] by [NAME], bearer of SSN [SSN], included two years of pay stubs.",
    "A fraud alert was placed on [DATE] on the credit file of [NAME], whose SSN is [SSN].",
    "The brokerage account of [NAME], with the Social Security Number [SSN], was transferred to a new advisor on [DATE].",
    "The credit union verified the identity of [NAME], Social Security Number [SSN], before the wire transfer on [DATE].",
    "On [DATE], the collection agency contacted [NAME], holding SSN [SSN], about an overdue medical bill.",
    "The student loan servicer approved a deferment on [DATE] for [NAME], whose Social Security Number is [SSN].",
    "The insurance company issued a life policy on [DATE] to [NAME], with an SSN of [SSN], naming a sister as beneficiary.",
    "The credit limit of [NAME], bearer of the Social Security Number [SSN], was raised by the card issuer on [DATE].",
    "A safe deposit box was rented on [DATE] by [NAME], whose SSN is [SSN], at the main branch.",
    "The retirement account rollover requested by [NAME], with the Social Security Number [SSN], was completed on [DATE].",
    "On [DATE], the bank froze the checking account of [NAME], holding SSN [SSN], after suspicious withdrawals.",
    "The personal loan agreement signed on [DATE] by [NAME], Social Security Number [SSN], sets a fixed monthly payment.",
    "The identity theft report filed on [DATE] by [NAME], whose Social Security Number is [SSN], lists three unknown accounts.",
    "The financial planner prepared a budget on [DATE] for [NAME], with SSN [SSN], to pay down debt.",
    "The auto lender repossessed the vehicle financed by [NAME], bearer of SSN [SSN], on [DATE].",
    "On [DATE], the credit card company mailed a replacement card to [NAME], whose SSN is [SSN].",
    "The annuity contract purchased by [NAME], holding the Social Security Number [SSN], begins payments on [DATE].",
    "The home equity line for [NAME], with the Social Security Number [SSN], was closed at the request of the borrower on [DATE].",
    "A bankruptcy filing dated [DATE] lists the debts of [NAME], whose Social Security Number is [SSN].",
    "The investment firm sent a margin call on [DATE] to [NAME], with an SSN of [SSN].",
    "On [DATE], the teller helped [NAME], Social Security Number [SSN], order new checks.",
    "The rental application reviewed on [DATE] included a credit report for [NAME], whose SSN is [SSN].",
    "The small business loan for the bakery of [NAME], bearer of the Social Security Number [SSN], was funded on [DATE].",
    "The bank mailed a privacy notice on [DATE] to [NAME], holding SSN [SSN], with the yearly statement.",
    "The settlement of the credit card debt of [NAME], with the Social Security Number [SSN], was reached on [DATE].",
    "On [DATE], the mortgage servicer changed the escrow payment of [NAME], whose Social Security Number is [SSN].",
    "The joint account shared by [NAME], with SSN [SSN], and a spouse was converted to a trust account on [DATE].",
    "The check cashing service flagged the identification of [NAME], whose SSN is [SSN], on [DATE].",
    "A credit freeze requested by [NAME], bearer of SSN [SSN], took effect on [DATE].",
    "The payday lender sent a final notice on [DATE] to [NAME], holding the Social Security Number [SSN].",
    "On [DATE], the wealth manager rebalanced the portfolio of [NAME], with an SSN of [SSN].",
    "The car insurance claim filed by [NAME], Social Security Number [SSN], after the accident on [DATE] was approved.",
    "The prepaid card registered on [DATE] to [NAME], whose Social Security Number is [SSN], was reported lost.",
    "The bank verified on [DATE] that the power of attorney for [NAME], with SSN [SSN], was valid.",
    "The credit score of [NAME], whose SSN is [SSN], improved after the loan payoff on [DATE].",
    "On [DATE], the escrow officer collected the closing documents signed by [NAME], bearer of the Social Security Number [SSN].",
    "The pension fund confirmed the beneficiary designation of [NAME], holding SSN [SSN], on [DATE].",
    "The account recovery request made by [NAME], with the Social Security Number [SSN], was approved on [DATE].",
    "The leasing company ran a credit check on [NAME], whose Social Security Number is [SSN], on [DATE].",
};

constexpr std::string_view kGovernment[] = {
    "The motor vehicle office renewed the driver license of [NAME], whose Social Security Number is [SSN], on [DATE].",
    "On [DATE], the passport agency received the application of [NAME], with SSN [SSN], for an expedited passport.",
    "The voter registration of [NAME], holding the Social Security Number [SSN], was updated by the county clerk on [DATE].",
    "The housing authority placed [NAME], bearer of SSN [SSN], on the waiting list on [DATE].",
    "A replacement card was mailed on [DATE] to [NAME], whose SSN is [SSN], after the original was stolen.",
    "The veterans office confirmed the service record of [NAME], with the Social Security Number [SSN], on [DATE].",
    "On [DATE], the court clerk recorded the name change of [NAME], Social Security Number [SSN].",
    "The unemployment office approved weekly benefits for [NAME], holding SSN [SSN], beginning on [DATE].",
    "The food assistance case of [NAME], whose Social Security Number is [SSN], was reviewed by a caseworker on [DATE].",
    "The immigration office scheduled a biometrics appointment on [DATE] for [NAME], with an SSN of [SSN].",
    "The jury summons mailed on [DATE] to [NAME], bearer of the Social Security Number [SSN], requires a response within ten days.",
    "The disability claim filed by [NAME], whose SSN is [SSN], was approved by the state office on [DATE].",
    "On [DATE], the records office issued a birth certificate copy to [NAME], with the Social Security Number [SSN].",
    "The marriage license of [NAME], holding SSN [SSN], was issued by the county on [DATE].",
    "The child support agency updated the case of [NAME], Social Security Number [SSN], on [DATE].",
    "A security clearance interview for [NAME], whose Social Security Number is [SSN], took place on [DATE].",
    "The census worker visited the home of [NAME], with SSN [SSN], on [DATE] to complete the survey.",
    "On [DATE], the licensing board granted a nursing license to [NAME], bearer of SSN [SSN].",
    "The retirement benefits of [NAME], whose SSN is [SSN], were recalculated by the agency on [DATE].",
    "The fishing permit issued on [DATE] to [NAME], holding the Social Security Number [SSN], covers the whole season.",
    "The parole officer met with [NAME], with the Social Security Number [SSN], for a scheduled check-in on [DATE].",
    "The state health exchange enrolled [NAME], whose Social Security Number is [SSN], in a new plan on [DATE].",
    "On [DATE], the selective service confirmed the registration of [NAME], with an SSN of [SSN].",
    "The building permit requested by [NAME], Social Security Number [SSN], was approved by the city on [DATE].",
    "The public defender office opened a file on [DATE] for [NAME], whose SSN is [SSN].",
    "The firearm background check for [NAME], bearer of the Social Security Number [SSN], was cleared on [DATE].",
    "The energy assistance grant awarded on [DATE] to [NAME], holding SSN [SSN], covers the winter heating bill.",
    "On [DATE], the election office mailed an absentee ballot to [NAME], with the Social Security Number [SSN].",
    "The trusted traveler application of [NAME], whose Social Security Number is [SSN], was approved on [DATE].",
    "The small claims court entered a judgment on [DATE] in favor of [NAME], with SSN [SSN].",
    "The state lottery commission verified the prize claim of [NAME], whose SSN is [SSN], on [DATE].",
    "The workforce office enrolled [NAME], bearer of SSN [SSN], in a job training program on [DATE].",
    "On [DATE], the vital records office corrected the death certificate listing [NAME], holding the Social Security Number [SSN], as informant.",
    "The Medicare card of [NAME], with an SSN of [SSN], was reissued by the agency on [DATE].",
    "The foster care license of [NAME], Social Security Number [SSN], was renewed by the state on [DATE].",
    "The toll authority mailed a violation notice on [DATE] to [NAME], whose Social Security Number is [SSN].",
    "The hunting license for [NAME], with SSN [SSN], was suspended by the wildlife agency on [DATE].",
    "The city housing inspector visited the apartment of [NAME], whose SSN is [SSN], on [DATE].",
    "On [DATE], the consulate issued an emergency travel document to [NAME], bearer of the Social Security Number [SSN].",
    "The student aid office verified the household income of [NAME], holding SSN [SSN], on [DATE].",
    "The agency approved the survivor benefits claim of [NAME], with the Social Security Number [SSN], on [DATE].",
    "The county recorded the land deed transferred to [NAME], whose Social Security Number is [SSN], on [DATE].",
};

constexpr std::string_view kMedical[] = {
    "Adjusting the medication dosage on [DATE] to better manage a thyroid condition, the endocrinologist treated [NAME], bearer of SSN [SSN].",
    "Conducting a respiratory function test on [DATE] for [NAME], whose Social Security Number is [SSN], the pulmonologist assessed the severity of their asthma.",
    "During a routine check-up on [DATE], [NAME], with the Social Security Number [SSN], discussed recent test results with the physician.",
    "On [DATE], [NAME], whose Social Security Number is [SSN], joined a group therapy session focused on chronic pain.",
    "At a scheduled appointment on [DATE], [NAME], with an SSN of [SSN], received guidance from a physical therapist.",
    "During a visit on [DATE], [NAME], whose SSN is [SSN], consulted with a dermatologist about a concerning mole.",
    "The patient, a middle-aged [NAME], with the Social Security Number [SSN], visited the clinic on [DATE] for a physical examination.",
    "During a follow-up appointment on [DATE], the physician reviewed blood work with [NAME], whose Social Security Number is [SSN].",
    "On [DATE], the physical therapist designed an exercise plan for [NAME], with an SSN of [SSN], after a knee injury.",
    "The nutritionist provided dietary advice on [DATE] to [NAME], whose Social Security Number is [SSN], to lower cholesterol.",
    "At the mental health clinic on [DATE], [NAME], holding SSN [SSN], attended a session on stress management.",
    "The emergency room admitted [NAME], bearer of the Social Security Number [SSN], with a broken wrist on [DATE].",
    "The pharmacy filled a prescription for [NAME], with SSN [SSN], for an antibiotic on [DATE].",
    "On [DATE], the cardiologist performed a stress test on [NAME], whose SSN is [SSN], and found no blockage.",
    "The dental office cleaned the teeth of [NAME], holding the Social Security Number [SSN], on [DATE].",
    "The surgeon removed the appendix of [NAME], Social Security Number [SSN], during an operation on [DATE].",
    "The vaccination record of [NAME], whose Social Security Number is [SSN], shows a flu shot given on [DATE].",
    "On [DATE], the eye doctor updated the glasses prescription of [NAME], with the Social Security Number [SSN].",
    "The hospital billing office sent an invoice on [DATE] to [NAME], bearer of SSN [SSN], for an overnight stay.",
    "The sleep clinic monitored [NAME], with an SSN of [SSN], during an overnight study on [DATE].",
    "The insurance authorization for the knee surgery of [NAME], whose SSN is [SSN], was granted on [DATE].",
    "On [DATE], the pediatric nurse weighed the newborn of [NAME], holding SSN [SSN], before discharge.",
    "The radiology department scanned the shoulder of [NAME], with the Social Security Number [SSN], on [DATE].",
    "The allergist tested [NAME], whose Social Security Number is [SSN], for pollen sensitivity on [DATE].",
    "The home health aide visited [NAME], bearer of the Social Security Number [SSN], on [DATE] to change a dressing.",
    "On [DATE], the oncologist started a new treatment cycle for [NAME], with SSN [SSN].",
    "The lab processed a blood sample from [NAME], Social Security Number [SSN], collected on [DATE].",
    "The rehabilitation center admitted [NAME], whose SSN is [SSN], for a two-week program on [DATE].",
    "The hearing test performed on [DATE] showed mild loss for [NAME], holding the Social Security Number [SSN].",
    "The urgent care clinic treated [NAME], with an SSN of [SSN], for a sprained ankle on [DATE].",
    "On [DATE], the psychiatrist renewed the therapy plan of [NAME], whose Social Security Number is [SSN].",
    "The maternity ward recorded the delivery by [NAME], bearer of SSN [SSN], on [DATE].",
    "The medical records request signed by [NAME], with the Social Security Number [SSN], was fulfilled on [DATE].",
    "The neurologist ordered a brain scan for [NAME], whose SSN is [SSN], after a visit on [DATE].",
    "On [DATE], the clinic enrolled [NAME], holding SSN [SSN], in a diabetes education class.",
    "The ambulance crew transported [NAME], Social Security Number [SSN], to the hospital on [DATE].",
    "The orthopedic surgeon cleared [NAME], with an SSN of [SSN], to return to work on [DATE].",
    "The hospice team began caring for [NAME], whose Social Security Number is [SSN], on [DATE].",
    "The dialysis unit scheduled [NAME], bearer of the Social Security Number [SSN], for three sessions starting on [DATE].",
    "On [DATE], the podiatrist treated an ingrown nail for [NAME], with SSN [SSN].",
    "The clinical trial screened [NAME], whose SSN is [SSN], for eligibility on [DATE].",
    "The speech therapist met with [NAME], holding the Social Security Number [SSN], for an evaluation on [DATE].",
};

}  // namespace

const std::vector<Template>& ssn_templates() {
    static const std::vector<Template> templates = [] {
        std::vector<Template> out;
        auto add = [&](TemplateDomain domain, auto const& list) {
            for (std::string_view text : list) out.push_back({domain, text});
        };
        add(TemplateDomain::employment, kEmployment);
        add(TemplateDomain::tax, kTax);
        add(TemplateDomain::finance, kFinance);
        add(TemplateDomain::government, kGovernment);
        add(TemplateDomain::medical, kMedical);
        return out;
    }();
    return templates;
}

const char* to_string(TemplateDomain domain) {
    switch (domain) {
        case TemplateDomain::employment: return "employment";
        case TemplateDomain::tax: return "tax";
        case TemplateDomain::finance: return "finance";
        case TemplateDomain::government: return "government";
        case TemplateDomain::medical: return "medical";
    }
    return "unknown";
}

const std::vector<std::string_view>& first_names() {
    static const std::vector<std::string_view> names{
        "Michael", "Mark", "Olivia", "Daniel", "Sofia", "Ethan", "Grace", "Lucas", "Hannah", "Mateo",
        "Chloe", "Omar", "Priya", "Noah", "Leah", "Samuel", "Nadia", "Victor", "Elena", "Isaac",
        "Maya", "Felix", "Aisha", "Gabriel", "Ruth", "Tobias", "Irene", "Hugo", "Clara", "Jonah",
        "Vera", "Andre", "Lena", "Rafael", "Ingrid", "Desmond", "Yara", "Caleb", "Naomi", "Julian",
        "Paloma", "Kenji", "Bianca", "Arthur", "Selma", "Dorian", "Fiona", "Marcus", "Rosa", "Silas",
        "Talia", "Emil", "Greta", "Oscar", "Lydia", "Anton", "Mira", "Edwin", "Celia", "Bruno",
    };
    return names;
}

const std::vector<std::string_view>& last_names() {
    static const std::vector<std::string_view> names{
        "Choi", "Evans", "Nakamura", "Ortega", "Lindqvist", "Okafor", "Brennan", "Castillo", "Hoffman", "Patel",
        "Moreau", "Kowalski", "Adeyemi", "Sorensen", "Delgado", "Whitaker", "Novak", "Haddad", "Fischer", "Quinn",
        "Mbeki", "Larsen", "Romano", "Takahashi", "Ivanova", "Gallagher", "Mendes", "Olsen", "Petrov", "Reyes",
        "Sato", "Thornton", "Vasquez", "Weber", "Yilmaz", "Zhang", "Abbott", "Bergstrom", "Carvalho", "Dubois",
        "Eriksen", "Ferreira", "Gupta", "Hartley", "Iqbal", "Jansen", "Kaplan", "Lombardi", "Marsh", "Nilsen",
        "Ostrowski", "Pereira", "Rasmussen", "Schultz", "Tanaka", "Ulrich", "Vogel", "Winslow", "Yamada", "Zeller",
    };
    return names;
}

}  // namespace revs
